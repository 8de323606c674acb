use rand::seq::index;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::mahalanobis::{center, DataMatrix};
use crate::numerics::{self, median, Matrix, RankTolerance};
use crate::projection::Projector;

/// Scales the MAD to the standard deviation at the normal.
pub const MAD_CONSISTENCY: f64 = 1.4826;

/// Projections whose MAD falls below this fraction of their spread are
/// treated as piled.
const PILE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Row indices, ascending.
    pub flagged: Vec<usize>,
    /// Per-row outlyingness on the scale of `cutoff`; may be infinite.
    pub outlyingness: Vec<f64>,
    pub cutoff: f64,
}

impl Detection {
    fn from_scores(outlyingness: Vec<f64>, cutoff: f64) -> Self {
        let flagged = outlyingness
            .iter()
            .enumerate()
            .filter(|(_, &o)| o > cutoff)
            .map(|(i, _)| i)
            .collect();
        Detection {
            flagged,
            outlyingness,
            cutoff,
        }
    }

    fn none(n: usize) -> Self {
        Detection {
            flagged: Vec::new(),
            outlyingness: vec![0.0; n],
            cutoff: f64::INFINITY,
        }
    }

    pub fn count(&self) -> usize {
        self.flagged.len()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Square root of the chi-square quantile at `1 - alpha`; for one degree of
/// freedom this is the two-sided normal quantile at `1 - alpha / 2`.
fn chi_cutoff(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
        .sqrt()
}

/// Fold one projection's robust z-scores into the running maxima.
fn accumulate_robust_z(values: &[f64], outlyingness: &mut [f64]) {
    let mut scratch = values.to_vec();
    let med = median(&mut scratch);
    let deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    let spread = deviations.iter().copied().fold(0.0, f64::max);
    let scale = med.abs().max(spread);
    if spread <= f64::EPSILON * scale {
        // all points coincide on this direction
        return;
    }
    scratch.copy_from_slice(&deviations);
    let mad = MAD_CONSISTENCY * median(&mut scratch);
    let piled = mad <= PILE_TOLERANCE * spread;
    for (o, &dev) in outlyingness.iter_mut().zip(&deviations) {
        let z = if piled {
            if dev > 1e-6 * spread {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            dev / mad
        };
        if z > *o {
            *o = z;
        }
    }
}

/// Projection-pursuit outlyingness: the largest robust z-score
/// `|v_i - median(v)| / (1.4826 MAD(v))` over a set of projections `v`.
///
/// Directions join random pairs of observations in the Mahalanobis-standardized
/// space (all pairs when `directions` exceeds their number). With
/// `adversarial`, and when `p >= n - 1`, the `n` piling directions are added;
/// on each of them every row but one coincides, so every row gets infinite
/// outlyingness. Finite scores are rescaled so their median matches that of
/// a chi variable with as many degrees of freedom as the rank `q` of the data,
/// and a row is flagged when its score exceeds the square root of the
/// chi-square(`q`) `1 - alpha` quantile.
pub fn detect_sd<R: Rng + ?Sized>(
    x: &DataMatrix,
    alpha: f64,
    directions: usize,
    adversarial: bool,
    rng: &mut R,
) -> Result<Detection> {
    check_alpha(alpha)?;
    if directions == 0 {
        return Err(Error::InvalidArgument(
            "at least one direction is required".into(),
        ));
    }
    let n = x.n();
    let projector = match Projector::new(x, RankTolerance::default()) {
        Ok(p) => p,
        Err(Error::DegenerateData) => return Ok(Detection::none(n)),
        Err(e) => return Err(e),
    };
    let z = &projector.standardized().z;
    let mut outlyingness = vec![0.0; n];

    let pairs = n * (n - 1) / 2;
    let picks: Vec<usize> = if directions >= pairs {
        (0..pairs).collect()
    } else {
        index::sample(rng, pairs, directions).into_vec()
    };
    for pick in picks {
        let (i, j) = pair_from_index(pick, n);
        let diff = (z.row(i) - z.row(j)).transpose();
        let norm = diff.norm();
        if norm == 0.0 {
            continue;
        }
        let values = z * (diff / norm);
        accumulate_robust_z(values.as_slice(), &mut outlyingness);
    }

    if adversarial && x.p() + 1 >= n && projector.standardized().q == n - 1 {
        for row in 0..n {
            let pile = projector.piling(row)?;
            accumulate_robust_z(pile.projected.as_slice(), &mut outlyingness);
        }
    }

    let q = projector.standardized().q;
    rescale_to_chi_median(&mut outlyingness, q);
    Ok(Detection::from_scores(outlyingness, chi_cutoff(q, alpha)))
}

/// Multiply finite scores so their median matches the median of a chi
/// variable with `dof` degrees of freedom. Skipped when the median itself is
/// zero or infinite.
fn rescale_to_chi_median(outlyingness: &mut [f64], dof: usize) {
    let mut scratch = outlyingness.to_vec();
    let med = median(&mut scratch);
    if !(med.is_finite() && med > 0.0) {
        return;
    }
    let target = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5)
        .sqrt();
    let factor = target / med;
    for o in outlyingness.iter_mut().filter(|o| o.is_finite()) {
        *o *= factor;
    }
}

/// Decode `0..n(n-1)/2` into the pair `(i, j)`, `i < j`, in row-major order.
fn pair_from_index(mut k: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row_len = n - 1 - i;
        if k < row_len {
            return (i, i + 1 + k);
        }
        k -= row_len;
        i += 1;
    }
}

/// Principal-component reduction followed by a classical Mahalanobis rule.
///
/// Keeps the fewest leading components whose variance reaches
/// `var_explained` of the total (at most `n / 2` of them) and flags rows whose
/// squared distance in that subspace exceeds the chi-square `1 - alpha`
/// quantile with one degree of freedom per retained component.
pub fn detect_pca_reduce(x: &DataMatrix, alpha: f64, var_explained: f64) -> Result<Detection> {
    check_alpha(alpha)?;
    if !(var_explained > 0.0 && var_explained <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "explained-variance fraction must lie in (0, 1], got {var_explained}"
        )));
    }
    let n = x.n();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let (_, xc) = center(x);
    let d = numerics::svd(&xc)?;
    let rank = d.rank(RankTolerance::default()).min(n - 1);
    if rank == 0 {
        return Ok(Detection::none(n));
    }
    let variances: Vec<f64> = d.singular_values.iter().take(rank).map(|s| s * s).collect();
    let total: f64 = variances.iter().sum();
    let mut kept = 0;
    let mut acc = 0.0;
    while kept < rank {
        acc += variances[kept];
        kept += 1;
        if acc >= var_explained * total * (1.0 - 1e-12) {
            break;
        }
    }
    let kept = kept.min((n / 2).max(1));

    // scores T = U_k diag(sigma_k); T_ij^2 / lambda_j = (n - 1) U_ij^2
    let scaled: Matrix = d.left.columns(0, kept) * (n as f64 - 1.0).sqrt();
    let dist: Vec<f64> = scaled.row_iter().map(|r| r.norm()).collect();
    Ok(Detection::from_scores(dist, chi_cutoff(kept, alpha)))
}
