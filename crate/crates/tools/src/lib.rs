//! Monte Carlo sweeps, record files and the command line around
//! [`mapridge_core`].
//!
//! - [`experiments`] runs the risk-vs-λ, contour, double-descent and
//!   estimator sweeps;
//! - [`records`] holds sweep records and writes them as CSV and JSON;
//! - [`config`] is the sweep configuration with its JSON merge rules and the
//!   figure presets;
//! - [`cli`] is the `mapridge` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod records;
pub mod spectrum_file;

pub use config::{CovarianceSpec, Grid, SweepConfig, SweepKind, TestRiskMode};
pub use error::{Result, RunError};
pub use records::{SweepRecord, Table};
