use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mahalanobis::{self, center, DataMatrix};
use crate::numerics::{self, Matrix, RankTolerance, Vector};

/// Normal sample whose sample mean is exactly `mean` and whose sample
/// covariance is exactly the identity.
///
/// Draws iid standard normal deviates and whitens them with the symmetric
/// inverse root of their own sample covariance.
pub fn mvn_sample_empirical<R: Rng + ?Sized>(
    n: usize,
    mean: &Vector,
    rng: &mut R,
) -> Result<Matrix> {
    let q = mean.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if q == 0 || q > n - 1 {
        return Err(Error::Infeasible(format!(
            "identity covariance in {q} dimensions needs 1 <= q <= n - 1 (n = {n})"
        )));
    }
    // a rank-deficient normal draw has probability zero; retry a few times anyway
    for _ in 0..8 {
        let draws = Matrix::from_fn(n, q, |_, _| rng.sample(StandardNormal));
        let std = mahalanobis::standardize(&DataMatrix::new(draws)?, RankTolerance::default())?;
        if std.q < q {
            continue;
        }
        let mut sample = std.whitened();
        for mut row in sample.row_iter_mut() {
            row += mean.transpose();
        }
        return Ok(sample);
    }
    Err(Error::Infeasible(
        "could not draw a full-rank normal sample".into(),
    ))
}

/// Mean and principal structure of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupComponent {
    pub label: String,
    pub size: usize,
    pub mean: Vector,
    /// `p x r`, orthonormal principal axes with nonzero variance.
    pub rotation: Matrix,
    /// Standard deviation along each axis, non-increasing.
    pub scales: Vector,
}

impl GroupComponent {
    pub fn p(&self) -> usize {
        self.mean.len()
    }

    /// No variability: every observation equals the mean.
    pub fn is_degenerate(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn covariance(&self) -> Matrix {
        let scaled = &self.rotation * Matrix::from_diagonal(&self.scales.map(|s| s * s));
        scaled * self.rotation.transpose()
    }
}

/// Per-group normal model; rows of simulated data follow the group order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupModel {
    pub groups: Vec<GroupComponent>,
}

impl GroupModel {
    pub fn p(&self) -> usize {
        self.groups.first().map_or(0, GroupComponent::p)
    }

    pub fn n(&self) -> usize {
        self.groups.iter().map(|g| g.size).sum()
    }

    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().all(GroupComponent::is_degenerate)
    }

    /// Marginal model of a subset of the variables.
    pub fn restrict_columns(&self, cols: &[usize]) -> Result<GroupModel> {
        if cols.is_empty() {
            return Err(Error::Shape("empty variable subset".into()));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.p()) {
            return Err(Error::Shape(format!(
                "variable {bad} out of range for {} variables",
                self.p()
            )));
        }
        let groups = self
            .groups
            .iter()
            .map(|g| GroupComponent {
                label: g.label.clone(),
                size: g.size,
                mean: Vector::from_iterator(cols.len(), cols.iter().map(|&c| g.mean[c])),
                rotation: g.rotation.select_rows(cols.iter()),
                scales: g.scales.clone(),
            })
            .collect();
        Ok(GroupModel { groups })
    }
}

pub fn fit_group_model(x: &DataMatrix) -> Result<GroupModel> {
    let tol = RankTolerance::default();
    let mut groups = Vec::new();
    for (label, rows) in x.groups() {
        if rows.len() < 2 {
            return Err(Error::InsufficientGroup {
                label,
                size: rows.len(),
            });
        }
        let sub = x.select_rows(&rows);
        let (mean, xc) = center(&sub);
        let d = numerics::svd(&xc)?;
        let r = d.rank(tol).min(rows.len() - 1);
        let dof = (rows.len() as f64 - 1.0).sqrt();
        groups.push(GroupComponent {
            label,
            size: rows.len(),
            mean,
            rotation: d.right.columns(0, r).into_owned(),
            scales: d.singular_values.rows(0, r) / dof,
        });
    }
    Ok(GroupModel { groups })
}

/// One dataset with each group's sample mean and covariance equal to the
/// model's.
pub fn simulate_like<R: Rng + ?Sized>(model: &GroupModel, rng: &mut R) -> Result<DataMatrix> {
    let p = model.p();
    let mut x = Matrix::zeros(model.n(), p);
    let mut labels = Vec::with_capacity(model.n());
    let mut offset = 0;
    for g in &model.groups {
        let mut block = if g.is_degenerate() {
            Matrix::zeros(g.size, p)
        } else {
            let scores = mvn_sample_empirical(g.size, &Vector::zeros(g.scales.len()), rng)?;
            scores * Matrix::from_diagonal(&g.scales) * g.rotation.transpose()
        };
        for mut row in block.row_iter_mut() {
            row += g.mean.transpose();
        }
        x.rows_mut(offset, g.size).copy_from(&block);
        labels.extend(std::iter::repeat_n(g.label.clone(), g.size));
        offset += g.size;
    }
    DataMatrix::with_labels(x, labels)
}
