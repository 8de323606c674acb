//! Centering, covariance, generalized Mahalanobis standardization and the
//! distance diagnostics built on top of it.
//!
//! Everything here is computed from the thin SVD of the centered data
//! `X_c = U diag(sigma) V^T`. With `S = X_c^T X_c / (n - 1)` the
//! generalized inverse root restricted to `range(S)` gives scores
//! `Z = sqrt(n - 1) U_q`, so `D = X_c S^+ X_c^T = Z Z^T` never needs the
//! `p x p` covariance. For `p >= n - 1` the scores form a regular simplex:
//! every point sits at `(n - 1) / sqrt(n)` from the centre and every pair at
//! `sqrt(2 (n - 1))`.

use crate::error::{Error, Result};
use crate::numerics::{self, check_finite, Matrix, RankTolerance, Vector};

/// `n x p` observations (rows) by variables (columns), optionally labelled.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    x: Matrix,
    labels: Option<Vec<String>>,
}

impl DataMatrix {
    pub fn new(x: Matrix) -> Result<Self> {
        check_finite(&x)?;
        Ok(DataMatrix { x, labels: None })
    }

    pub fn with_labels(x: Matrix, labels: Vec<String>) -> Result<Self> {
        check_finite(&x)?;
        if labels.len() != x.nrows() {
            return Err(Error::Shape(format!(
                "{} labels for {} rows",
                labels.len(),
                x.nrows()
            )));
        }
        Ok(DataMatrix {
            x,
            labels: Some(labels),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(Matrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.x
    }

    pub fn into_matrix(self) -> Matrix {
        self.x
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Distinct labels in order of first appearance, with their row indices.
    /// Unlabelled data forms a single group named `all`.
    pub fn groups(&self) -> Vec<(String, Vec<usize>)> {
        let Some(labels) = &self.labels else {
            return vec![("all".to_string(), (0..self.n()).collect())];
        };
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            match groups.iter_mut().find(|(l, _)| l == label) {
                Some((_, rows)) => rows.push(i),
                None => groups.push((label.clone(), vec![i])),
            }
        }
        groups
    }

    pub fn select_rows(&self, rows: &[usize]) -> DataMatrix {
        DataMatrix {
            x: self.x.select_rows(rows.iter()),
            labels: self
                .labels
                .as_ref()
                .map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<DataMatrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.p()) {
            return Err(Error::Shape(format!(
                "column {bad} out of range for {} variables",
                self.p()
            )));
        }
        if cols.is_empty() {
            return Err(Error::Shape("empty column selection".into()));
        }
        Ok(DataMatrix {
            x: self.x.select_columns(cols.iter()),
            labels: self.labels.clone(),
        })
    }

    /// Rank of the centered matrix equals `min(p, n - 1)`.
    pub fn is_general_position(&self, tol: RankTolerance) -> Result<bool> {
        let (_, centered) = center(self);
        let r = numerics::rank(&centered, tol)?.min(self.n().saturating_sub(1));
        Ok(r == self.p().min(self.n().saturating_sub(1)))
    }
}

fn require_two(x: &DataMatrix) -> Result<()> {
    if x.n() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.n(),
        });
    }
    Ok(())
}

pub fn center(x: &DataMatrix) -> (Vector, Matrix) {
    let m = x.matrix();
    let n = m.nrows() as f64;
    let mean = Vector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n));
    let mut centered = m.clone();
    for (j, mut col) in centered.column_iter_mut().enumerate() {
        col.add_scalar_mut(-mean[j]);
    }
    (mean, centered)
}

pub fn covariance(x: &DataMatrix) -> Result<Matrix> {
    require_two(x)?;
    let (_, xc) = center(x);
    Ok(xc.transpose() * &xc / (x.n() as f64 - 1.0))
}

/// Mahalanobis-standardized data in the rank-`q` subspace of the covariance.
#[derive(Debug, Clone)]
pub struct StandardizedData {
    /// `n x q` scores with zero mean and identity covariance.
    pub z: Matrix,
    pub mean: Vector,
    /// `p x q`; centered rows times this factor give the scores.
    pub invsqrt_factor: Matrix,
    /// `p x q` orthonormal principal axes spanning `range(S)`.
    pub loadings: Matrix,
    /// Standard deviations along `loadings` (square roots of the nonzero
    /// eigenvalues of `S`), non-increasing.
    pub root_scales: Vector,
    pub q: usize,
    pub tol: RankTolerance,
}

impl StandardizedData {
    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    /// Scores expressed back in variable coordinates, `X_c S^{-1/2}` with the
    /// symmetric root on `range(S)`. Unlike `z`, this does not depend on the
    /// orientation chosen for the principal axes.
    pub fn whitened(&self) -> Matrix {
        &self.z * self.loadings.transpose()
    }

    /// `x_i = S^{1/2} z_i + mean`, recovering the data.
    pub fn reconstruct(&self) -> Matrix {
        let mut x = &self.z * Matrix::from_diagonal(&self.root_scales) * self.loadings.transpose();
        for mut row in x.row_iter_mut() {
            row += self.mean.transpose();
        }
        x
    }
}

pub fn standardize(x: &DataMatrix, tol: RankTolerance) -> Result<StandardizedData> {
    require_two(x)?;
    let (mean, xc) = center(x);
    let d = numerics::svd(&xc)?;
    // rank(X_c) <= n - 1 structurally; the cap guards against the v_1
    // direction surviving the cutoff through rounding.
    let q = d.rank(tol).min(x.n() - 1);
    if q == 0 {
        return Err(Error::DegenerateData);
    }
    let dof = (x.n() as f64 - 1.0).sqrt();
    let z = d.left.columns(0, q) * dof;
    let loadings = d.right.columns(0, q).into_owned();
    let sigma = d.singular_values.rows(0, q);
    let root_scales = sigma / dof;
    let mut invsqrt_factor = loadings.clone();
    for (j, mut col) in invsqrt_factor.column_iter_mut().enumerate() {
        col /= root_scales[j];
    }
    Ok(StandardizedData {
        z,
        mean,
        invsqrt_factor,
        loadings,
        root_scales,
        q,
        tol,
    })
}

/// Relative tolerance for the degeneracy verdict.
pub const DEFAULT_VERDICT_TOLERANCE: f64 = 1e-6;

/// Distances, `D`, the hat matrix and the simplex verdict for one dataset.
#[derive(Debug, Clone)]
pub struct DistanceDiagnostics {
    pub n: usize,
    pub p: usize,
    /// Rank of the centered data (the `q` of the standardization).
    pub rank: usize,
    /// `rank == min(p, n - 1)`; false flags duplicates or exact redundancies.
    pub general_position: bool,
    pub center_distances: Vector,
    pub pairwise: Matrix,
    pub d_matrix: Matrix,
    pub hat_matrix: Matrix,
    pub degenerate: bool,
    /// `((n - 1) / sqrt(n), sqrt(2 (n - 1)))`.
    pub constants: (f64, f64),
}

impl DistanceDiagnostics {
    pub fn rank_deficit(&self) -> usize {
        self.p.min(self.n - 1) - self.rank
    }
}

pub fn simplex_constants(n: usize) -> (f64, f64) {
    let n = n as f64;
    ((n - 1.0) / n.sqrt(), (2.0 * (n - 1.0)).sqrt())
}

pub fn distances(x: &DataMatrix, tol: RankTolerance) -> Result<DistanceDiagnostics> {
    distances_with(x, tol, DEFAULT_VERDICT_TOLERANCE)
}

pub fn distances_with(
    x: &DataMatrix,
    tol: RankTolerance,
    verdict_tol: f64,
) -> Result<DistanceDiagnostics> {
    let std = standardize(x, tol)?;
    let d_matrix = &std.z * std.z.transpose();
    Ok(assemble(x, std.q, d_matrix, verdict_tol))
}

fn assemble(
    x: &DataMatrix,
    rank: usize,
    d_matrix: Matrix,
    verdict_tol: f64,
) -> DistanceDiagnostics {
    let n = x.n();
    let center_distances =
        Vector::from_iterator(n, (0..n).map(|i| d_matrix[(i, i)].max(0.0).sqrt()));
    let pairwise = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (d_matrix[(i, i)] + d_matrix[(j, j)] - 2.0 * d_matrix[(i, j)])
                .max(0.0)
                .sqrt()
        }
    });
    let nf = n as f64;
    let hat_matrix = d_matrix.map(|d| d / (nf - 1.0) + 1.0 / nf);
    let constants = simplex_constants(n);
    let close = |v: f64, target: f64| (v - target).abs() <= verdict_tol * target;
    let degenerate = center_distances.iter().all(|&d| close(d, constants.0))
        && (0..n).all(|i| (0..n).all(|j| i == j || close(pairwise[(i, j)], constants.1)));
    DistanceDiagnostics {
        n,
        p: x.p(),
        rank,
        general_position: rank == x.p().min(n - 1),
        center_distances,
        pairwise,
        d_matrix,
        hat_matrix,
        degenerate,
        constants,
    }
}

/// Like [`distances`], but total: data whose rows all coincide yields zero
/// distances and a negative verdict instead of an error.
pub fn diagnose_degeneracy(x: &DataMatrix, tol: RankTolerance) -> Result<DistanceDiagnostics> {
    diagnose_degeneracy_with(x, tol, DEFAULT_VERDICT_TOLERANCE)
}

pub fn diagnose_degeneracy_with(
    x: &DataMatrix,
    tol: RankTolerance,
    verdict_tol: f64,
) -> Result<DistanceDiagnostics> {
    require_two(x)?;
    match distances_with(x, tol, verdict_tol) {
        Err(Error::DegenerateData) => {
            let n = x.n();
            let mut diag = assemble(x, 0, Matrix::zeros(n, n), verdict_tol);
            diag.degenerate = false;
            Ok(diag)
        }
        other => other,
    }
}
