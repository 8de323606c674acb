use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::binomial::{binomial_expected, total_variation};
use super::detectors::{detect_pca_reduce, detect_sd};
use super::sampling::{simulate_like, GroupModel};
use crate::error::{Error, Result};
use crate::numerics::median;

/// Caps the worker threads used by [`run_calibration`] when the config does
/// not set them.
pub const THREADS_ENV: &str = "HIDIM_THREADS";

pub type SimRng = ChaCha8Rng;

/// Independent stream for one replicate: the seed selects the key, the
/// replicate index the ChaCha stream.
pub fn replicate_rng(seed: u64, replicate: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detector {
    Sd { directions: usize },
    SdAdversarial { directions: usize },
    PcaReduce { var_explained: f64 },
}

impl Detector {
    pub fn name(&self) -> &'static str {
        match self {
            Detector::Sd { .. } => "sd",
            Detector::SdAdversarial { .. } => "sd-adversarial",
            Detector::PcaReduce { .. } => "pca",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub detector: Detector,
    pub group_model: GroupModel,
    /// Detect on these variables only (the model is marginalised first).
    pub variable_subset: Option<Vec<usize>>,
    /// Worker threads; `None` reads [`THREADS_ENV`], then falls back to the
    /// rayon default.
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn new(group_model: GroupModel, detector: Detector, seed: u64) -> Self {
        SimulationConfig {
            replicates: 500,
            alpha: 0.025,
            seed,
            detector,
            group_model,
            variable_subset: None,
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidArgument(
                "replicates must be at least 1".into(),
            ));
        }
        if self.group_model.groups.is_empty() {
            return Err(Error::InvalidArgument("group model has no groups".into()));
        }
        match self.detector {
            Detector::Sd { directions } | Detector::SdAdversarial { directions }
                if directions == 0 =>
            {
                Err(Error::InvalidArgument(
                    "at least one direction is required".into(),
                ))
            }
            Detector::PcaReduce { var_explained }
                if !(var_explained > 0.0 && var_explained <= 1.0) =>
            {
                Err(Error::InvalidArgument(format!(
                    "explained-variance fraction must lie in (0, 1], got {var_explained}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Outcome of the calibration for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCalibration {
    pub label: String,
    pub n: usize,
    /// Flags per replicate, in replicate order.
    pub counts: Vec<usize>,
    /// `observed_freq[c]` replicates flagged exactly `c` rows, `c = 0..=n`.
    pub observed_freq: Vec<usize>,
    /// Binomial(`n`, `alpha`) pmf times the number of replicates.
    pub expected_freq: Vec<f64>,
    pub median_count: f64,
    pub mean_count: f64,
    /// Total-variation distance between observed and expected tables.
    pub divergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub detector: Detector,
    pub p: usize,
    pub groups: Vec<GroupCalibration>,
}

impl CalibrationReport {
    pub fn group(&self, label: &str) -> Option<&GroupCalibration> {
        self.groups.iter().find(|g| g.label == label)
    }
}

fn detect_counts(
    config: &SimulationConfig,
    model: &GroupModel,
    replicate: usize,
) -> Result<Vec<usize>> {
    let mut rng = replicate_rng(config.seed, replicate as u64);
    let data = simulate_like(model, &mut rng)?;
    let mut counts = Vec::with_capacity(model.groups.len());
    let mut offset = 0;
    for g in &model.groups {
        let rows: Vec<usize> = (offset..offset + g.size).collect();
        offset += g.size;
        let group = data.select_rows(&rows);
        let detection = match config.detector {
            Detector::Sd { directions } => {
                detect_sd(&group, config.alpha, directions, false, &mut rng)?
            }
            Detector::SdAdversarial { directions } => {
                detect_sd(&group, config.alpha, directions, true, &mut rng)?
            }
            Detector::PcaReduce { var_explained } => {
                detect_pca_reduce(&group, config.alpha, var_explained)?
            }
        };
        counts.push(detection.count());
    }
    Ok(counts)
}

fn resolve_threads(config: &SimulationConfig) -> Option<usize> {
    config.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
    })
}

/// Simulate `replicates` datasets like the model, run the detector on each
/// group and compare the flag counts with binomial(`n`, `alpha`).
///
/// Replicate `r` draws from [`replicate_rng`]`(seed, r)` only, so the report
/// does not depend on how replicates are scheduled across threads.
pub fn run_calibration(config: &SimulationConfig) -> Result<CalibrationReport> {
    config.validate()?;
    let model = match &config.variable_subset {
        Some(cols) => config.group_model.restrict_columns(cols)?,
        None => config.group_model.clone(),
    };
    let run = || -> Result<Vec<Vec<usize>>> {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| detect_counts(config, &model, r))
            .collect()
    };
    let per_replicate = match resolve_threads(config) {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut groups = Vec::with_capacity(model.groups.len());
    for (gi, g) in model.groups.iter().enumerate() {
        let counts: Vec<usize> = per_replicate.iter().map(|c| c[gi]).collect();
        let mut observed_freq = vec![0usize; g.size + 1];
        for &c in &counts {
            observed_freq[c] += 1;
        }
        let expected_freq = binomial_expected(g.size, config.alpha, config.replicates)?;
        let observed: Vec<f64> = observed_freq.iter().map(|&f| f as f64).collect();
        let mut as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let mean_count = as_f64.iter().sum::<f64>() / as_f64.len() as f64;
        groups.push(GroupCalibration {
            label: g.label.clone(),
            n: g.size,
            median_count: median(&mut as_f64),
            mean_count,
            divergence: total_variation(&observed, &expected_freq),
            counts,
            observed_freq,
            expected_freq,
        });
    }
    Ok(CalibrationReport {
        replicates: config.replicates,
        alpha: config.alpha,
        seed: config.seed,
        detector: config.detector,
        p: model.p(),
        groups,
    })
}
