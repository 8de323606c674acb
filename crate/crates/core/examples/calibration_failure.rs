//! Outlier-detector calibration on data simulated like a two-group
//! expression study, at a low and a high dimension.
//!
//! Run with `cargo run --release --example calibration_failure`.

use hidim::fixtures;
use hidim::outlier_lab::{fit_group_model, run_calibration, Detector, SimulationConfig};

fn main() -> hidim::Result<()> {
    let data = fixtures::colon_like(1);
    let model = fit_group_model(&data)?;
    let replicates = 500;

    for p in [5usize, 60] {
        let columns: Vec<usize> = (0..p).collect();
        for detector in [
            Detector::PcaReduce { var_explained: 0.9 },
            Detector::Sd { directions: 250 },
            Detector::SdAdversarial { directions: 250 },
        ] {
            let mut config = SimulationConfig::new(model.clone(), detector, 200);
            config.replicates = replicates;
            config.variable_subset = Some(columns.clone());
            let report = run_calibration(&config)?;
            for g in &report.groups {
                println!(
                    "p = {p:>2} {:<15} group {} (n = {:>2}): median {:>4} mean {:>6.2} expected {:>5.2} tv {:.3}",
                    detector.name(),
                    g.label,
                    g.n,
                    g.median_count,
                    g.mean_count,
                    g.n as f64 * report.alpha,
                    g.divergence
                );
            }
        }
    }
    Ok(())
}
