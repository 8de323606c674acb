//! Dense linear algebra substrate: symmetric eigendecomposition, thin SVD,
//! Moore-Penrose pseudo-inverse, PSD square roots and numerical rank.
//!
//! Matrices are `nalgebra` types; the SVD and the symmetric
//! eigendecomposition are computed by `faer`, which stays accurate on the
//! exactly rank-deficient matrices (centered data) this crate lives on. This
//! module fixes ordering, rank cutoffs and the square-root convention on top.

use faer::Side;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Cutoff below which singular values (or eigenvalues) count as zero.
///
/// The default is `max(rows, cols) * f64::EPSILON * sigma_max`; a custom
/// relative factor replaces `max(rows, cols) * f64::EPSILON`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RankTolerance {
    relative: Option<f64>,
}

impl RankTolerance {
    pub fn relative(factor: f64) -> Self {
        assert!(
            factor.is_finite() && factor > 0.0,
            "relative cutoff must be positive, got {factor}"
        );
        RankTolerance {
            relative: Some(factor),
        }
    }

    pub fn factor(&self, rows: usize, cols: usize) -> f64 {
        self.relative
            .unwrap_or_else(|| rows.max(cols) as f64 * f64::EPSILON)
    }

    /// Absolute cutoff for a matrix of the given shape and largest singular value.
    pub fn cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.factor(rows, cols) * sigma_max
    }
}

#[derive(Debug, Clone)]
pub struct SymmetricEig {
    /// Non-increasing.
    pub values: Vector,
    /// Column `j` pairs with `values[j]`.
    pub vectors: Matrix,
}

impl SymmetricEig {
    pub fn reconstruct(&self) -> Matrix {
        &self.vectors * Matrix::from_diagonal(&self.values) * self.vectors.transpose()
    }
}

/// Thin SVD `m = left * diag(singular_values) * right^T`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: Matrix,
    pub singular_values: Vector,
    pub right: Matrix,
}

impl Svd {
    pub fn rows(&self) -> usize {
        self.left.nrows()
    }

    pub fn cols(&self) -> usize {
        self.right.nrows()
    }

    pub fn cutoff(&self, tol: RankTolerance) -> f64 {
        let sigma_max = self.singular_values.iter().copied().fold(0.0, f64::max);
        tol.cutoff(self.rows(), self.cols(), sigma_max)
    }

    pub fn rank(&self, tol: RankTolerance) -> usize {
        let cutoff = self.cutoff(tol);
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        &self.left * Matrix::from_diagonal(&self.singular_values) * self.right.transpose()
    }
}

pub(crate) fn check_finite(m: &Matrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Shape(format!(
            "matrix must be non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn sym_eig(m: &Matrix) -> Result<SymmetricEig> {
    check_finite(m)?;
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "symmetric eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = max_abs(m);
    let asym = max_abs(&(m - m.transpose()));
    if asym > 1e-12 * scale {
        return Err(Error::Shape(format!(
            "matrix is not symmetric (max |m - m^T| = {asym:e})"
        )));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Convergence("symmetric eigendecomposition"))?;
    // faer sorts ascending
    let n = m.nrows();
    let s = eig.S().column_vector();
    let u = eig.U();
    let values = Vector::from_fn(n, |i, _| s[n - 1 - i]);
    let vectors = Matrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok(SymmetricEig { values, vectors })
}

fn to_faer(m: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn svd(m: &Matrix) -> Result<Svd> {
    check_finite(m)?;
    let d = to_faer(m)
        .thin_svd()
        .map_err(|_| Error::Convergence("singular value decomposition"))?;
    let (u, v) = (d.U(), d.V());
    let s = d.S().column_vector();
    let left = Matrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]);
    let right = Matrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]);
    // non-increasing already; clamp signed zeros
    let singular_values = Vector::from_fn(s.nrows(), |i, _| s[i].max(0.0));
    Ok(Svd {
        left,
        singular_values,
        right,
    })
}

pub fn pinv(m: &Matrix, tol: RankTolerance) -> Result<Matrix> {
    let d = svd(m)?;
    let cutoff = d.cutoff(tol);
    let mut out = Matrix::zeros(m.ncols(), m.nrows());
    for (j, &s) in d.singular_values.iter().enumerate() {
        if s > cutoff {
            out += d.right.column(j) * d.left.column(j).transpose() / s;
        }
    }
    Ok(out)
}

/// Symmetric PSD square root of `m` (or of its pseudo-inverse when `inverse`).
///
/// Eigenvalues within the rank cutoff of zero are treated as exact zeros, so
/// the inverse root is supported on `range(m)` only.
pub fn psd_sqrt(m: &Matrix, tol: RankTolerance, inverse: bool) -> Result<Matrix> {
    let eig = sym_eig(m)?;
    let largest = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let cutoff = tol.cutoff(m.nrows(), m.ncols(), largest);
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for (j, &lambda) in eig.values.iter().enumerate() {
        if lambda < -cutoff {
            return Err(Error::NotPsd {
                eigenvalue: lambda,
                cutoff,
            });
        }
        if lambda <= cutoff {
            continue;
        }
        let root = if inverse {
            1.0 / lambda.sqrt()
        } else {
            lambda.sqrt()
        };
        let v = eig.vectors.column(j);
        out += v * v.transpose() * root;
    }
    Ok(out)
}

pub fn rank(m: &Matrix, tol: RankTolerance) -> Result<usize> {
    Ok(svd(m)?.rank(tol))
}

/// Frobenius distance between `q^T q` and the identity.
pub fn orthonormality_error(q: &Matrix) -> f64 {
    let gram = q.transpose() * q;
    (gram - Matrix::identity(q.ncols(), q.ncols())).norm()
}

/// Median of a non-empty slice; reorders `values`.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let eig = sym_eig(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(eig.values.as_slice(), &[1.0, 1.0, 1.0]);
        assert!(orthonormality_error(&eig.vectors) < 1e-12);

        let eig = sym_eig(&Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 4.0]))).unwrap();
        assert_eq!(eig.values.as_slice(), &[4.0, 1.0]);
        assert!((eig.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((eig.vectors[(0, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_rejects_bad_shapes() {
        assert!(matches!(
            sym_eig(&Matrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn svd_diagonal_and_rank_one() {
        let d = svd(&Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).unwrap();
        assert_eq!(d.singular_values.as_slice(), &[3.0, 2.0]);

        let ones = Matrix::from_element(4, 4, 1.0);
        let d = svd(&ones).unwrap();
        assert_eq!(d.rank(RankTolerance::default()), 1);
        assert!((d.singular_values[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn svd_rejects_non_finite() {
        let m = Matrix::from_row_slice(1, 2, &[1.0, f64::NAN]);
        assert_eq!(svd(&m).unwrap_err(), Error::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn pinv_small_cases() {
        let tol = RankTolerance::default();
        let i3 = Matrix::identity(3, 3);
        assert!(rel_err(&pinv(&i3, tol).unwrap(), &i3) < 1e-15);

        let m = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let expected = Matrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(rel_err(&pinv(&m, tol).unwrap(), &expected) < 1e-15);

        let zero = Matrix::zeros(2, 3);
        assert_eq!(pinv(&zero, tol).unwrap(), Matrix::zeros(3, 2));
    }

    #[test]
    fn psd_sqrt_diagonal_cases() {
        let tol = RankTolerance::default();
        let m = Matrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let r = psd_sqrt(&m, tol, false).unwrap();
        assert!(rel_err(&r, &Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])) < 1e-15);

        let m = Matrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.0]);
        let r = psd_sqrt(&m, tol, true).unwrap();
        assert!(rel_err(&r, &Matrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn psd_sqrt_rejects_negative_eigenvalue() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            psd_sqrt(&m, RankTolerance::default(), false),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        let tol = RankTolerance::default();
        assert_eq!(rank(&Matrix::identity(4, 4), tol).unwrap(), 4);
        assert_eq!(rank(&Matrix::from_element(3, 3, 1.0), tol).unwrap(), 1);
    }

    #[test]
    fn custom_tolerance_cutoff() {
        let tol = RankTolerance::relative(1e-3);
        let m = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-4]);
        assert_eq!(rank(&m, tol).unwrap(), 1);
        assert_eq!(rank(&m, RankTolerance::default()).unwrap(), 2);
    }

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
