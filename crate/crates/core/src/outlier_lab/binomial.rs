use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Expected frequencies of 0..=n flags over `replicates` runs when the count
/// is binomial(`n`, `alpha`). The pmf is evaluated in log space.
pub fn binomial_expected(n: usize, alpha: f64, replicates: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let (ln_a, ln_b) = (alpha.ln(), (-alpha).ln_1p());
    Ok((0..=n)
        .map(|k| {
            let ln_pmf = ln_binomial(n as u64, k as u64) + k as f64 * ln_a + (n - k) as f64 * ln_b;
            ln_pmf.exp() * replicates as f64
        })
        .collect())
}

/// Total-variation distance between two frequency tables, each normalised
/// by its own total. Tables of different length are zero-padded.
pub fn total_variation(observed: &[f64], expected: &[f64]) -> f64 {
    let ta: f64 = observed.iter().sum();
    let tb: f64 = expected.iter().sum();
    let len = observed.len().max(expected.len());
    let at = |v: &[f64], i: usize, t: f64| v.get(i).map_or(0.0, |x| x / t);
    0.5 * (0..len)
        .map(|i| (at(observed, i, ta) - at(expected, i, tb)).abs())
        .sum::<f64>()
}
