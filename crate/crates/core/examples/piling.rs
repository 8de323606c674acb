//! Piling: in high dimension every observation can be split off from the
//! rest, which all land on a single point.
//!
//! Run with `cargo run --example piling`.

use hidim::fixtures::{random_data, Law};
use hidim::{Projector, RankTolerance};

fn main() -> hidim::Result<()> {
    let x = random_data(10, 20, Law::Normal, 8);
    let projector = Projector::new(&x, RankTolerance::default())?;
    println!(
        "{:>4} {:>12} {:>12} {:>14}",
        "row", "own value", "pile value", "pile spread"
    );
    for row in 0..x.n() {
        let pile = projector.piling(row)?;
        let others: Vec<f64> = (0..x.n())
            .filter(|&i| i != row)
            .map(|i| pile.projected[i])
            .collect();
        let lo = others.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = others.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{row:>4} {:>12.6} {:>12.6} {:>14.2e}",
            pile.projected[row],
            lo,
            hi - lo
        );
    }
    Ok(())
}
