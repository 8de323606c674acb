//! Mahalanobis distances collapse to two constants once `p >= n - 1`,
//! whatever law generated the data.
//!
//! Run with `cargo run --example simplex_degeneracy`.

use hidim::fixtures::{random_data, Law};
use hidim::mahalanobis::{diagnose_degeneracy, simplex_constants};
use hidim::RankTolerance;

fn main() -> hidim::Result<()> {
    let n = 8;
    let (centre, pair) = simplex_constants(n);
    println!("n = {n}: simplex constants {centre:.6} (to the mean), {pair:.6} (pairwise)\n");
    println!(
        "{:<16} {:>3} {:>4} {:>12} {:>12} {:>10}",
        "law", "p", "rank", "max centre", "max pair", "degenerate"
    );
    for law in Law::ALL {
        for p in [3, n - 2, n - 1, 3 * n] {
            let x = random_data(n, p, law, 11);
            let d = diagnose_degeneracy(&x, RankTolerance::default())?;
            let max_pair = d.pairwise.iter().copied().fold(0.0, f64::max);
            println!(
                "{:<16} {:>3} {:>4} {:>12.6} {:>12.6} {:>10}",
                format!("{law:?}"),
                p,
                d.rank,
                d.center_distances.max(),
                max_pair,
                d.degenerate
            );
        }
    }
    Ok(())
}
