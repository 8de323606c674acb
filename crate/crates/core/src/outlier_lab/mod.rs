//! Monte Carlo calibration of outlier detectors on normal data that matches
//! a dataset's per-group means and covariances exactly.
//!
//! Two detector families are provided: a projection-pursuit (Stahel-Donoho
//! type) rule in the full standardized space, and a rule that first reduces
//! to a few principal components. Under a correctly calibrated detector the
//! number of flags in a group of `n` normal observations is
//! binomial(`n`, `alpha`); [`run_calibration`] tabulates how far each
//! detector is from that.

mod binomial;
mod calibration;
mod detectors;
mod sampling;

pub use binomial::{binomial_expected, total_variation};
pub use calibration::{
    replicate_rng, run_calibration, CalibrationReport, Detector, GroupCalibration, SimRng,
    SimulationConfig, THREADS_ENV,
};
pub use detectors::{detect_pca_reduce, detect_sd, Detection, MAD_CONSISTENCY};
pub use sampling::{
    fit_group_model, mvn_sample_empirical, simulate_like, GroupComponent, GroupModel,
};
