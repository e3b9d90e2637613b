//! Experiment harness for first-passage percolation estimates.

pub mod config;
pub mod dist_check;
pub mod error;
pub mod plot;
pub mod rows;
pub mod run;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use rows::ResultRow;
pub use run::{execute, run, run_path, RunOutcome};
