//! Orthogonal projections of a dataset that reproduce an arbitrary target
//! configuration up to an affine map.
//!
//! With standardized scores `Z` (`n x q`) and a standardized target `Y`
//! (`n x k`), `U = (Z^T Z)^+ Z^T Y` is the least-squares coefficient of `Y`
//! on `Z`. Writing `W U = V1 L V2` (thin SVD, `W` the inverse-root factor)
//! gives `Q = V1`, `A = V2^T L^-1` and `b = V1^T mean`. When `p >= n - 1`
//! the scores span every centered configuration and the fit is exact.

use crate::error::{Error, Result};
use crate::mahalanobis::{self, center, DataMatrix, StandardizedData};
use crate::numerics::{self, Matrix, RankTolerance, Vector};

/// Target arrangement of the `n` points in `k` dimensions.
#[derive(Debug, Clone)]
pub struct TargetConfig {
    raw: Matrix,
    standardized: Matrix,
    mean: Vector,
    /// Symmetric inverse root of the target covariance.
    invsqrt: Matrix,
}

impl TargetConfig {
    /// Accepts raw coordinates; `k` must be at most `n - 1` and the centered
    /// target must have full column rank.
    pub fn new(y: Matrix) -> Result<Self> {
        numerics::check_finite(&y)?;
        let (n, k) = y.shape();
        if n < 2 || k >= n {
            return Err(Error::Target(format!(
                "{k}-dimensional target for {n} points; need 1 <= k <= n - 1"
            )));
        }
        let tol = RankTolerance::default();
        let data = DataMatrix::new(y.clone())?;
        let (mean, yc) = center(&data);
        let rank = numerics::rank(&yc, tol)?;
        if rank < k {
            return Err(Error::Target(format!(
                "centered target has rank {rank}, expected {k}"
            )));
        }
        let cov = yc.transpose() * &yc / (n as f64 - 1.0);
        let invsqrt = numerics::psd_sqrt(&cov, tol, true)?;
        let standardized = &yc * &invsqrt;
        Ok(TargetConfig {
            raw: y,
            standardized,
            mean,
            invsqrt,
        })
    }

    pub fn n(&self) -> usize {
        self.raw.nrows()
    }

    pub fn k(&self) -> usize {
        self.raw.ncols()
    }

    pub fn raw(&self) -> &Matrix {
        &self.raw
    }

    /// Zero mean, identity covariance.
    pub fn standardized(&self) -> &Matrix {
        &self.standardized
    }

    /// Rewrite `XQ = Y_std A + 1 b^T` in terms of the raw target.
    fn to_raw_affine(&self, a_std: Matrix, b_std: Vector) -> (Matrix, Vector) {
        let a = &self.invsqrt * a_std;
        let b = b_std - a.transpose() * &self.mean;
        (a, b)
    }
}

/// `X Q ~ Y A + 1 b^T` with orthonormal `Q`.
#[derive(Debug, Clone)]
pub struct ProjectionPlan {
    /// `p x k`, orthonormal columns.
    pub q: Matrix,
    /// `k x k`, maps the raw target onto the projection.
    pub a: Matrix,
    pub b: Vector,
    /// Relative misfit of the best affine alignment of `XQ` onto the target.
    pub residual: f64,
}

impl ProjectionPlan {
    pub fn project(&self, x: &DataMatrix) -> Matrix {
        x.matrix() * &self.q
    }

    /// `Y A + 1 b^T` for the target this plan was built for.
    pub fn predicted(&self, target: &TargetConfig) -> Matrix {
        let mut out = target.raw() * &self.a;
        for mut row in out.row_iter_mut() {
            row += self.b.transpose();
        }
        out
    }
}

/// Direction onto which all rows but one project to a single value.
#[derive(Debug, Clone)]
pub struct PilingDirection {
    pub row: usize,
    pub direction: Vector,
    pub projected: Vector,
}

/// A dataset prepared for repeated projections: the standardization is
/// computed once and reused for every target.
#[derive(Debug, Clone)]
pub struct Projector<'a> {
    x: &'a DataMatrix,
    std: StandardizedData,
}

impl<'a> Projector<'a> {
    pub fn new(x: &'a DataMatrix, tol: RankTolerance) -> Result<Self> {
        let std = mahalanobis::standardize(x, tol)?;
        Ok(Projector { x, std })
    }

    pub fn standardized(&self) -> &StandardizedData {
        &self.std
    }

    fn require_general_position(&self) -> Result<()> {
        let expected = self.x.p().min(self.x.n() - 1);
        if self.std.q != expected {
            return Err(Error::NotGeneralPosition {
                rank: self.std.q,
                expected,
            });
        }
        Ok(())
    }

    fn check_target(&self, target: &TargetConfig) -> Result<()> {
        if target.n() != self.x.n() {
            return Err(Error::Target(format!(
                "target has {} points, data has {}",
                target.n(),
                self.x.n()
            )));
        }
        Ok(())
    }

    pub fn exact(&self, target: &TargetConfig) -> Result<ProjectionPlan> {
        let (n, p) = (self.x.n(), self.x.p());
        if p + 1 < n {
            return Err(Error::Precondition(format!(
                "exact projection needs p >= n - 1 (p = {p}, n = {n}); use the least-squares variant"
            )));
        }
        self.check_target(target)?;
        self.require_general_position()?;
        let coeffs = self.std.z.transpose() * target.standardized() / (n as f64 - 1.0);
        self.plan_from_coefficients(coeffs, target)
    }

    pub fn approx(&self, target: &TargetConfig) -> Result<ProjectionPlan> {
        self.check_target(target)?;
        self.require_general_position()?;
        let z = &self.std.z;
        let gram_pinv = numerics::pinv(&(z.transpose() * z), self.std.tol)?;
        let coeffs = gram_pinv * z.transpose() * target.standardized();
        self.plan_from_coefficients(coeffs, target)
    }

    fn plan_from_coefficients(
        &self,
        coeffs: Matrix,
        target: &TargetConfig,
    ) -> Result<ProjectionPlan> {
        let k = target.k();
        let m = &self.std.invsqrt_factor * coeffs;
        let d = numerics::svd(&m)?;
        if d.singular_values.len() < k || d.rank(RankTolerance::default()) < k {
            return Err(Error::Target(format!(
                "data cannot support a {k}-dimensional projection (rank {})",
                d.rank(RankTolerance::default())
            )));
        }
        // W U is p x k: left vectors live in variable space, right ones are k x k
        let mut q = d.left.columns(0, k).into_owned();
        let mut right = d.right.columns(0, k).into_owned();
        for j in 0..k {
            let col = q.column(j);
            let (imax, _) = col.iter().enumerate().fold((0, 0.0_f64), |acc, (i, v)| {
                if v.abs() > acc.1 {
                    (i, v.abs())
                } else {
                    acc
                }
            });
            if col[imax] < 0.0 {
                q.column_mut(j).neg_mut();
                right.column_mut(j).neg_mut();
            }
        }
        let l_inv = Matrix::from_diagonal(&d.singular_values.rows(0, k).map(|s| 1.0 / s));
        let a_std = right * l_inv;
        let b_std = q.transpose() * &self.std.mean;
        let (a, b) = target.to_raw_affine(a_std, b_std);
        let projected = self.x.matrix() * &q;
        let residual = alignment_residual(&projected, target)?;
        Ok(ProjectionPlan { q, a, b, residual })
    }

    pub fn piling(&self, row: usize) -> Result<PilingDirection> {
        let n = self.x.n();
        if row >= n {
            return Err(Error::InvalidArgument(format!(
                "row {row} out of range for {n} observations"
            )));
        }
        let y = Matrix::from_fn(n, 1, |i, _| if i == row { 1.0 } else { 0.0 });
        let plan = self.exact(&TargetConfig::new(y)?)?;
        let direction = plan.q.column(0).into_owned();
        let projected = self.x.matrix() * &direction;
        Ok(PilingDirection {
            row,
            direction,
            projected,
        })
    }
}

pub fn exact_projection(x: &DataMatrix, target: &TargetConfig) -> Result<ProjectionPlan> {
    Projector::new(x, RankTolerance::default())?.exact(target)
}

pub fn approx_projection(x: &DataMatrix, target: &TargetConfig) -> Result<ProjectionPlan> {
    Projector::new(x, RankTolerance::default())?.approx(target)
}

pub fn piling_direction(x: &DataMatrix, distinguished: usize) -> Result<PilingDirection> {
    Projector::new(x, RankTolerance::default())?.piling(distinguished)
}

/// Relative Frobenius misfit of the least-squares affine alignment of
/// `projected` onto the standardized target: `|(I - P) Y| / |Y|`, where `P`
/// projects onto the span of an intercept and the columns of `projected`.
/// Zero iff the target is an affine image of the projection.
pub fn alignment_residual(projected: &Matrix, target: &TargetConfig) -> Result<f64> {
    if projected.nrows() != target.n() {
        return Err(Error::Shape(format!(
            "projection has {} rows, target has {}",
            projected.nrows(),
            target.n()
        )));
    }
    let n = projected.nrows();
    let design = Matrix::from_fn(n, projected.ncols() + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            projected[(i, j - 1)]
        }
    });
    let y = target.standardized();
    let coef = numerics::pinv(&design, RankTolerance::default())? * y;
    let misfit = y - design * coef;
    Ok(misfit.norm() / y.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_data() -> DataMatrix {
        DataMatrix::new(Matrix::from_row_slice(
            3,
            2,
            &[0.3, -1.2, 4.0, 0.5, 1.1, 2.7],
        ))
        .unwrap()
    }

    #[test]
    fn target_rejects_rank_deficiency() {
        let y = Matrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        assert!(matches!(TargetConfig::new(y), Err(Error::Target(_))));
        let y = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(TargetConfig::new(y), Err(Error::Target(_))));
    }

    #[test]
    fn target_is_standardized() {
        let y = Matrix::from_row_slice(4, 2, &[0.0, 1.0, 3.0, 1.0, 2.0, 5.0, -1.0, 0.0]);
        let t = TargetConfig::new(y).unwrap();
        let s = t.standardized();
        let cov = s.transpose() * s / 3.0;
        assert!((cov - Matrix::identity(2, 2)).norm() < 1e-12);
        assert!(s.row_sum().norm() < 1e-12);
    }

    #[test]
    fn triangle_onto_any_triangle() {
        let x = triangle_data();
        let y = Matrix::from_row_slice(3, 2, &[0.0, 0.0, 10.0, 0.0, 0.0, 1.0]);
        let target = TargetConfig::new(y).unwrap();
        let plan = exact_projection(&x, &target).unwrap();
        assert!(plan.residual <= 1e-8);
        assert!(numerics::orthonormality_error(&plan.q) <= 1e-12);
        let err = (plan.project(&x) - plan.predicted(&target)).norm();
        assert!(err <= 1e-9 * plan.project(&x).norm(), "{err}");
    }

    #[test]
    fn exact_requires_high_dimension() {
        let x = DataMatrix::new(Matrix::from_fn(5, 2, |i, j| {
            ((i * 7 + j * 3) % 5) as f64 + 0.1 * (i * j) as f64
        }))
        .unwrap();
        let target = TargetConfig::new(Matrix::from_fn(5, 1, |i, _| i as f64)).unwrap();
        assert!(matches!(
            exact_projection(&x, &target),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sign_convention_largest_entry_positive() {
        let x = triangle_data();
        let y = Matrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let plan = exact_projection(&x, &TargetConfig::new(y).unwrap()).unwrap();
        let col = plan.q.column(0);
        let largest = col
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap();
        assert!(largest > 0.0);
    }

    #[test]
    fn residual_zero_for_affine_image_and_positive_after_perturbation() {
        let y = Matrix::from_row_slice(5, 2, &[0.0, 1.0, 2.0, -1.0, 3.0, 3.0, -1.0, 0.5, 1.0, 2.0]);
        let target = TargetConfig::new(y.clone()).unwrap();
        let a = Matrix::from_row_slice(2, 2, &[2.0, -1.0, 0.5, 3.0]);
        let mut projected = &y * a;
        for mut row in projected.row_iter_mut() {
            row[0] += 4.0;
            row[1] -= 7.0;
        }
        assert!(alignment_residual(&projected, &target).unwrap() < 1e-10);

        let mut perturbed = y.clone();
        perturbed[(2, 0)] += 0.5;
        assert!(alignment_residual(&perturbed, &target).unwrap() > 1e-3);
    }

    #[test]
    fn piling_two_points() {
        let x = DataMatrix::new(Matrix::from_row_slice(
            2,
            3,
            &[1.0, 2.0, 3.0, 0.0, 2.0, 5.0],
        ))
        .unwrap();
        let pile = piling_direction(&x, 1).unwrap();
        assert!((pile.direction.norm() - 1.0).abs() < 1e-12);
        assert!((pile.projected[0] - pile.projected[1]).abs() > 1e-6);
    }

    #[test]
    fn piling_row_out_of_range() {
        assert!(matches!(
            piling_direction(&triangle_data(), 3),
            Err(Error::InvalidArgument(_))
        ));
    }
}
