//! Seeded synthetic datasets.
//!
//! [`colon_like`] mimics the shape of a two-group gene-expression study:
//! 22 `N` and 40 `T` samples on 2000 variables, on a log2 scale, with a
//! handful of shared latent factors, a group shift and small gene-level noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal, Uniform};

use crate::mahalanobis::DataMatrix;
use crate::numerics::Matrix;

pub const COLON_NORMAL: usize = 22;
pub const COLON_TUMOR: usize = 40;
pub const COLON_GENES: usize = 2000;

const FACTORS: usize = 4;

/// Generating law for [`random_data`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Normal,
    Uniform,
    /// Standard Cauchy entries.
    HeavyTailed,
    /// Standard normal with row 0 shifted by 50 in every variable.
    PlantedOutlier,
}

impl Law {
    pub const ALL: [Law; 4] = [
        Law::Normal,
        Law::Uniform,
        Law::HeavyTailed,
        Law::PlantedOutlier,
    ];
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng + ?Sized>(n: usize, p: usize, law: Law, rng: &mut R) -> Matrix {
    let uniform = Uniform::new(-1.0, 1.0).expect("valid range");
    let cauchy = Cauchy::new(0.0, 1.0).expect("valid scale");
    let mut m = Matrix::from_fn(n, p, |_, _| match law {
        Law::Normal | Law::PlantedOutlier => rng.sample(StandardNormal),
        Law::Uniform => uniform.sample(rng),
        Law::HeavyTailed => cauchy.sample(rng),
    });
    if law == Law::PlantedOutlier {
        m.row_mut(0).add_scalar_mut(50.0);
    }
    m
}

pub fn random_data(n: usize, p: usize, law: Law, seed: u64) -> DataMatrix {
    DataMatrix::new(random_matrix(n, p, law, &mut rng(seed))).expect("finite draws")
}

pub fn colon_like(seed: u64) -> DataMatrix {
    colon_like_sized(COLON_NORMAL, COLON_TUMOR, COLON_GENES, seed)
}

/// Two-group log2-scale expression data; the `normal` rows labelled `N`
/// come first, then the `tumor` rows labelled `T`.
pub fn colon_like_sized(normal: usize, tumor: usize, genes: usize, seed: u64) -> DataMatrix {
    let mut rng = rng(seed);
    let normal_draw = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
    let baseline: Vec<f64> = (0..genes)
        .map(|_| 7.0 + 1.5 * normal_draw(&mut rng))
        .collect();
    let shift: Vec<f64> = (0..genes).map(|_| normal_draw(&mut rng)).collect();
    let loadings = Matrix::from_fn(FACTORS, genes, |_, _| 0.8 * normal_draw(&mut rng));

    let n = normal + tumor;
    let mut x = Matrix::zeros(n, genes);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let is_tumor = i >= normal;
        labels.push(if is_tumor { "T" } else { "N" }.to_string());
        let factors: Vec<f64> = (0..FACTORS).map(|_| normal_draw(&mut rng)).collect();
        for j in 0..genes {
            let latent: f64 = (0..FACTORS).map(|f| factors[f] * loadings[(f, j)]).sum();
            let group = if is_tumor { shift[j] } else { 0.0 };
            x[(i, j)] = baseline[j] + group + latent + 0.3 * normal_draw(&mut rng);
        }
    }
    DataMatrix::with_labels(x, labels).expect("finite draws")
}

/// Two well-separated clusters in the plane, one per group, each laid out
/// on a small circle so the configuration has rank 2.
pub fn two_cluster_target(sizes: &[usize]) -> Matrix {
    let n: usize = sizes.iter().sum();
    let mut y = Matrix::zeros(n, 2);
    let mut row = 0;
    for (g, &size) in sizes.iter().enumerate() {
        let cx = if g % 2 == 0 { -3.0 } else { 3.0 };
        for t in 0..size {
            let angle = std::f64::consts::TAU * t as f64 / size as f64;
            y[(row, 0)] = cx + angle.cos();
            y[(row, 1)] = angle.sin();
            row += 1;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colon_shape_and_labels() {
        let x = colon_like_sized(3, 4, 25, 1);
        assert_eq!((x.n(), x.p()), (7, 25));
        let labels = x.labels().unwrap();
        assert_eq!(labels[0], "N");
        assert_eq!(labels[3], "T");
        let groups = x.groups();
        assert_eq!(groups[0].1.len(), 3);
        assert_eq!(groups[1].1.len(), 4);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        assert_eq!(colon_like_sized(3, 4, 10, 5), colon_like_sized(3, 4, 10, 5));
        assert_ne!(
            random_data(4, 3, Law::Normal, 1),
            random_data(4, 3, Law::Normal, 2)
        );
    }
}
