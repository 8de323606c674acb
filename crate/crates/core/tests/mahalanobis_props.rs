use hidim::fixtures::{random_data, random_matrix, rng, Law};
use hidim::mahalanobis::{
    center, covariance, diagnose_degeneracy, distances, simplex_constants, standardize,
};
use hidim::numerics::svd;
use hidim::{DataMatrix, Matrix, RankTolerance, Vector};
use proptest::prelude::*;

fn law() -> impl Strategy<Value = Law> {
    prop::sample::select(Law::ALL.to_vec())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Distances from the textbook formulas with an explicitly inverted covariance.
fn explicit_inverse_oracle(x: &Matrix) -> (Vec<f64>, Matrix, Matrix) {
    let n = x.nrows();
    let p = x.ncols();
    let mean: Vec<f64> = (0..p).map(|j| x.column(j).sum() / n as f64).collect();
    let xc = Matrix::from_fn(n, p, |i, j| x[(i, j)] - mean[j]);
    let s = xc.transpose() * &xc / (n as f64 - 1.0);
    let s_inv = s.try_inverse().expect("invertible covariance");
    let quad = |v: &Vector| (v.transpose() * &s_inv * v)[(0, 0)];
    let centre: Vec<f64> = (0..n)
        .map(|i| quad(&xc.row(i).transpose()).sqrt())
        .collect();
    let pair = Matrix::from_fn(n, n, |i, j| {
        let diff = (x.row(i) - x.row(j)).transpose();
        quad(&diff).sqrt()
    });
    // hat matrix of the regression on [1, X] from a Householder QR
    let g = Matrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let q = g.qr().q();
    let hat = &q * q.transpose();
    (centre, pair, hat)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplex_when_dimension_reaches_n_minus_one(
        n in 3usize..12, extra in 0usize..25, law in law(), seed in any::<u64>()
    ) {
        let p = n - 1 + extra;
        let d = distances(&random_data(n, p, law, seed), RankTolerance::default()).unwrap();
        let (c, pw) = simplex_constants(n);
        prop_assert!(d.center_distances.iter().all(|&v| rel_close(v, c, 1e-6)));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert!(rel_close(d.pairwise[(i, j)], pw, 1e-6));
                }
            }
        }
        prop_assert!(d.degenerate);
        prop_assert_eq!(d.rank, n - 1);
    }

    #[test]
    fn bounds_and_trace_below_n_minus_one(
        n in 4usize..15, p_frac in 0.0f64..1.0, law in law(), seed in any::<u64>()
    ) {
        let p = 1 + ((n - 3) as f64 * p_frac) as usize;
        let x = random_data(n, p, law, seed);
        let d = distances(&x, RankTolerance::default()).unwrap();
        let (c, pw) = simplex_constants(n);
        prop_assert!(d.center_distances.max() <= c + 1e-8);
        prop_assert!(d.pairwise.max() <= pw + 1e-8);
        let sum_sq: f64 = d.center_distances.iter().map(|v| v * v).sum();
        prop_assert!((sum_sq - (n - 1) as f64 * d.rank as f64).abs() <= 1e-8 * (n * n) as f64);
        prop_assert!((d.d_matrix.trace() - (n - 1) as f64 * d.rank as f64).abs() <= 1e-8 * (n * n) as f64);
    }

    #[test]
    fn hat_matrix_is_a_projection(n in 3usize..10, p in 1usize..15, seed in any::<u64>()) {
        let d = distances(&random_data(n, p, Law::Normal, seed), RankTolerance::default()).unwrap();
        let h = &d.hat_matrix;
        prop_assert!((h * h - h).norm() < 1e-9);
        prop_assert!((h - h.transpose()).norm() < 1e-12);
        prop_assert!((h.trace() - (d.rank + 1) as f64).abs() < 1e-9);
        // rows sum to one because the intercept is in the span
        for i in 0..n {
            prop_assert!((h.row(i).sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn distances_are_affine_invariant(n in 3usize..9, p in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_matrix(n, p, Law::Normal, &mut r);
        let a = random_matrix(p, p, Law::Normal, &mut r) + Matrix::identity(p, p) * 3.0;
        prop_assume!(a.determinant().abs() > 1e-3);
        let shift = random_matrix(1, p, Law::Normal, &mut r);
        let mut y = &x * &a;
        for mut row in y.row_iter_mut() {
            row += &shift;
        }
        let tol = RankTolerance::default();
        let dx = distances(&DataMatrix::new(x).unwrap(), tol).unwrap();
        let dy = distances(&DataMatrix::new(y).unwrap(), tol).unwrap();
        prop_assert!((dx.d_matrix - dy.d_matrix).norm() < 1e-7 * n as f64);
    }

    #[test]
    fn matches_explicit_inverse(n in 3usize..7, p in 1usize..4, law in law(), seed in any::<u64>()) {
        prop_assume!(p + 1 < n);
        let x = random_data(n, p, law, seed);
        let (centre, pair, hat) = explicit_inverse_oracle(x.matrix());
        let d = distances(&x, RankTolerance::default()).unwrap();
        // an explicit inverse of S carries a relative error of order kappa^2 eps
        let sv = svd(&center(&x).1).unwrap().singular_values;
        let kappa = sv[0] / sv[p - 1];
        let tol = 1e-10_f64.max(100.0 * kappa * kappa * f64::EPSILON);
        for i in 0..n {
            prop_assert!(rel_close(d.center_distances[i], centre[i], tol));
            for j in 0..n {
                prop_assert!(rel_close(d.pairwise[(i, j)], pair[(i, j)], tol));
            }
        }
        let err = (&d.hat_matrix - &hat).amax();
        prop_assert!(err < 1e-10, "hat error {err:e}");
    }

    #[test]
    fn standardized_scores_are_white(n in 3usize..10, p in 1usize..20, seed in any::<u64>()) {
        let x = random_data(n, p, Law::Uniform, seed);
        let s = standardize(&x, RankTolerance::default()).unwrap();
        let z = DataMatrix::new(s.z.clone()).unwrap();
        let (mean, _) = center(&z);
        prop_assert!(mean.amax() < 1e-12);
        prop_assert!((covariance(&z).unwrap() - Matrix::identity(s.q, s.q)).amax() < 1e-10);
        prop_assert!((s.reconstruct() - x.matrix()).amax() < 1e-9);
    }
}

#[test]
fn duplicate_rows_break_general_position() {
    let mut m = random_matrix(5, 8, Law::Normal, &mut rng(3));
    let row = m.row(0).into_owned();
    m.row_mut(4).copy_from(&row);
    let d = diagnose_degeneracy(&DataMatrix::new(m).unwrap(), RankTolerance::default()).unwrap();
    assert!(!d.general_position);
    assert_eq!(d.rank_deficit(), 1);
    assert!(!d.degenerate);
    assert_eq!(d.pairwise[(0, 4)], 0.0);
}

#[test]
fn two_points_sit_one_apart_from_their_mean() {
    let x = DataMatrix::from_rows(&[vec![1.0, 5.0, -2.0], vec![3.0, 0.0, 7.0]]).unwrap();
    let d = distances(&x, RankTolerance::default()).unwrap();
    let expected = 1.0 / 2f64.sqrt();
    assert!(d
        .center_distances
        .iter()
        .all(|&v| (v - expected).abs() < 1e-12));
    assert!((d.pairwise[(0, 1)] - 2f64.sqrt()).abs() < 1e-12);
    assert!(d.degenerate);
}
