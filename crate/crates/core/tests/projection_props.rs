use hidim::fixtures::{random_matrix, rng, Law};
use hidim::numerics::orthonormality_error;
use hidim::projection::{
    alignment_residual, approx_projection, exact_projection, piling_direction,
};
use hidim::{DataMatrix, Matrix, TargetConfig};
use proptest::prelude::*;

/// `|(I - H) Y_std|_F / |Y_std|_F` with `H` from the normal equations of the
/// regression on `[1, P]` and `Y_std` whitened by an eigen-built inverse root.
fn normal_equations_residual(projected: &Matrix, y: &Matrix) -> f64 {
    let n = y.nrows();
    let k = y.ncols();
    let mean: Vec<f64> = (0..k).map(|j| y.column(j).sum() / n as f64).collect();
    let yc = Matrix::from_fn(n, k, |i, j| y[(i, j)] - mean[j]);
    let s = yc.transpose() * &yc / (n as f64 - 1.0);
    let eig = s.symmetric_eigen();
    let inv_root = &eig.eigenvectors
        * Matrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()))
        * eig.eigenvectors.transpose();
    let ys = yc * inv_root;
    let g = Matrix::from_fn(n, projected.ncols() + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            projected[(i, j - 1)]
        }
    });
    let gtg = g.transpose() * &g;
    let beta = gtg.try_inverse().expect("full column rank") * g.transpose() * &ys;
    (&ys - &g * beta).norm() / ys.norm()
}

fn instance(n: usize, p: usize, k: usize, seed: u64) -> (DataMatrix, TargetConfig) {
    let mut r = rng(seed);
    let x = DataMatrix::new(random_matrix(n, p, Law::Normal, &mut r)).unwrap();
    let y = random_matrix(n, k, Law::Uniform, &mut r);
    (x, TargetConfig::new(y).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_projection_reproduces_any_target(
        n in 3usize..15, extra in 0usize..20, k in 1usize..3, seed in any::<u64>()
    ) {
        prop_assume!(k < n);
        let (x, target) = instance(n, n - 1 + extra, k, seed);
        let plan = exact_projection(&x, &target).unwrap();
        prop_assert!(plan.residual <= 1e-8);
        prop_assert!(orthonormality_error(&plan.q) <= 1e-10);
        let gap = (plan.project(&x) - plan.predicted(&target)).amax();
        prop_assert!(gap <= 1e-8 * (1.0 + plan.project(&x).amax()));
    }

    #[test]
    fn approx_agrees_with_exact_in_high_dimension(
        n in 3usize..10, extra in 0usize..10, seed in any::<u64>()
    ) {
        let (x, target) = instance(n, n - 1 + extra, 2.min(n - 1), seed);
        let e = exact_projection(&x, &target).unwrap();
        let a = approx_projection(&x, &target).unwrap();
        prop_assert!((&e.q - &a.q).amax() < 1e-8);
        prop_assert!(a.residual <= 1e-8);
    }

    #[test]
    fn residual_lies_in_unit_interval_and_is_affine_invariant(
        n in 6usize..20, p in 2usize..5, seed in any::<u64>(), scale in 0.1f64..10.0, shift in -5.0f64..5.0
    ) {
        let (x, target) = instance(n, p, 2, seed);
        let plan = approx_projection(&x, &target).unwrap();
        prop_assert!((0.0..=1.0).contains(&plan.residual));
        let moved = TargetConfig::new(target.raw().map(|v| scale * v + shift)).unwrap();
        let again = alignment_residual(&plan.project(&x), &moved).unwrap();
        prop_assert!((again - plan.residual).abs() < 1e-9);
        let stretched = DataMatrix::new(x.matrix().map(|v| scale * v - shift)).unwrap();
        let plan2 = approx_projection(&stretched, &target).unwrap();
        prop_assert!((plan2.residual - plan.residual).abs() < 1e-8);
    }

    #[test]
    fn residual_matches_normal_equations(n in 4usize..7, seed in any::<u64>()) {
        let mut r = rng(seed);
        let projected = random_matrix(n, 2, Law::Normal, &mut r);
        let y = random_matrix(n, 2, Law::Normal, &mut r);
        let target = TargetConfig::new(y.clone()).unwrap();
        let ours = alignment_residual(&projected, &target).unwrap();
        prop_assert!((ours - normal_equations_residual(&projected, &y)).abs() < 1e-10);
    }

    #[test]
    fn piling_isolates_each_row(n in 3usize..12, extra in 0usize..10, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = DataMatrix::new(random_matrix(n, n - 1 + extra, Law::HeavyTailed, &mut r)).unwrap();
        for row in 0..n {
            let pile = piling_direction(&x, row).unwrap();
            let v = &pile.projected;
            let spread = v.max() - v.min();
            let others: Vec<f64> = (0..n).filter(|&i| i != row).map(|i| v[i]).collect();
            let lo = others.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = others.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(hi - lo <= 1e-6 * spread);
            prop_assert!((v[row] - lo).abs() > 0.5 * spread);
            prop_assert!((pile.direction.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn collinear_target_is_rejected() {
    let y = Matrix::from_fn(5, 2, |i, j| (i as f64) * (j as f64 + 1.0));
    assert!(TargetConfig::new(y).is_err());
}

#[test]
fn target_with_wrong_size_is_rejected() {
    let (x, _) = instance(5, 10, 2, 1);
    let (_, other) = instance(6, 10, 2, 1);
    assert!(exact_projection(&x, &other).is_err());
}
