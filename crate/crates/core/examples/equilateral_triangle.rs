//! Any three points in general position standardize to an equilateral
//! triangle with unit-free edge length 2.
//!
//! Run with `cargo run --example equilateral_triangle`.

use hidim::mahalanobis::{distances, standardize};
use hidim::{DataMatrix, RankTolerance};

fn main() -> hidim::Result<()> {
    let x = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![10.0, 0.5], vec![3.0, -7.0]])?;
    let std = standardize(&x, RankTolerance::default())?;
    println!("rank {}; standardized scores:", std.q);
    for row in std.z.row_iter() {
        println!("  {:>9.5} {:>9.5}", row[0], row[1]);
    }
    let d = distances(&x, RankTolerance::default())?;
    println!("pairwise Mahalanobis distances:");
    for i in 0..3 {
        for j in i + 1..3 {
            println!("  d({i},{j}) = {:.12}", d.pairwise[(i, j)]);
        }
    }
    println!(
        "hat matrix diagonal: {:?}",
        d.hat_matrix.diagonal().as_slice()
    );
    Ok(())
}
