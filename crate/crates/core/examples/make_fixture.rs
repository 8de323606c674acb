//! Write the seeded 62 x 2000 two-group fixture as CSV, ready for the
//! `hidim` binary.
//!
//! Run with `cargo run --example make_fixture -- colon.csv [seed]`.

use std::fs::File;
use std::io::BufWriter;

use hidim::{fixtures, io};

fn main() -> hidim::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "colon.csv".into());
    let seed = args
        .next()
        .map(|s| s.parse().expect("numeric seed"))
        .unwrap_or(1);
    let data = fixtures::colon_like(seed);
    let names = io::default_names("g", data.p());
    io::emit(BufWriter::new(File::create(&path)?), &data, &names, "group")?;
    println!("wrote {} x {} to {path}", data.n(), data.p());
    Ok(())
}
