//! Below `n - 1` variables the best orthogonal projection only approximates
//! a target; the misfit shrinks as variables are added and vanishes at
//! `p = n - 1`.
//!
//! Run with `cargo run --release --example least_squares_trend`.

use hidim::fixtures::{self, two_cluster_target, COLON_NORMAL, COLON_TUMOR};
use hidim::numerics::median;
use hidim::projection::approx_projection;
use hidim::TargetConfig;
use rand::seq::index;

fn main() -> hidim::Result<()> {
    let data = fixtures::colon_like(1);
    let target = TargetConfig::new(two_cluster_target(&[COLON_NORMAL, COLON_TUMOR]))?;
    let mut rng = fixtures::rng(2);
    let sizes = [5, 10, 20, 30, 40, 50, 60, 61];
    // one random column order per replicate; each size takes a prefix
    let orders: Vec<Vec<usize>> = (0..20)
        .map(|_| index::sample(&mut rng, data.p(), 61).into_vec())
        .collect();
    for p in sizes {
        let mut residuals = Vec::new();
        for order in &orders {
            let plan = approx_projection(&data.select_columns(&order[..p])?, &target)?;
            residuals.push(plan.residual);
        }
        println!("p = {p:>2}: median residual {:.3e}", median(&mut residuals));
    }
    Ok(())
}
