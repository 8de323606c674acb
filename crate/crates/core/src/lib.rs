//! Geometry of high-dimensional datasets.
//!
//! When the number of variables reaches `n - 1`, Mahalanobis-standardized
//! data always forms a regular simplex and any configuration of the points
//! can be obtained as an orthogonal projection. This crate computes those
//! objects ([`mahalanobis`], [`projection`]) and uses them to study how
//! outlier detectors calibrated at the normal behave as dimension grows
//! ([`outlier_lab`]).

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod mahalanobis;
pub mod numerics;
pub mod outlier_lab;
pub mod projection;

pub use error::{Error, Result};
pub use mahalanobis::{DataMatrix, DistanceDiagnostics, StandardizedData};
pub use numerics::{Matrix, RankTolerance, Vector};
pub use projection::{PilingDirection, ProjectionPlan, Projector, TargetConfig};
