//! In `p >= n - 1` dimensions an orthogonal projection can put the sample
//! into any chosen configuration, up to an affine map.
//!
//! Run with `cargo run --example arbitrary_projection`.

use hidim::fixtures::{random_data, two_cluster_target, Law};
use hidim::numerics::orthonormality_error;
use hidim::projection::{alignment_residual, exact_projection};
use hidim::{Matrix, TargetConfig};

fn main() -> hidim::Result<()> {
    // pure noise, 12 points in 30 dimensions
    let x = random_data(12, 30, Law::Normal, 4);
    let targets = [
        ("two clusters", two_cluster_target(&[6, 6])),
        ("letter L", letter_l()),
        ("one far point", {
            let mut y = two_cluster_target(&[12]);
            y[(0, 0)] += 40.0;
            y
        }),
    ];
    for (name, y) in targets {
        let target = TargetConfig::new(y)?;
        let plan = exact_projection(&x, &target)?;
        let projected = plan.project(&x);
        println!(
            "{name:<14} residual {:.2e}  |Q'Q - I| {:.2e}",
            alignment_residual(&projected, &target)?,
            orthonormality_error(&plan.q)
        );
        let gap = (&projected - plan.predicted(&target)).norm();
        println!("{:<14} |XQ - (YA + 1b')| {gap:.2e}", "");
    }
    Ok(())
}

fn letter_l() -> Matrix {
    let pts: Vec<(f64, f64)> = (0..7)
        .map(|i| (0.0, i as f64))
        .chain((1..6).map(|i| (i as f64, 0.0)))
        .collect();
    Matrix::from_fn(
        pts.len(),
        2,
        |i, j| if j == 0 { pts[i].0 } else { pts[i].1 },
    )
}
