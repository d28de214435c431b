//! Library half of the `localpress` command-line tool: config parsing and
//! validation, command pipelines, report envelopes, and the built-in
//! verification suite. The binary in `main.rs` is a thin argument-parsing
//! shell over this crate so that integration tests can drive every command
//! in-process.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod selftest;

pub use config::{
    EstimatorConfig, ExperimentConfig, MeasureConfig, PotentialConfig, SystemConfig, Tolerances,
};
pub use error::CliError;
pub use report::{CommandResults, ReportEnvelope};
pub use run::{grid_csv, run_command, write_atomically, Command};
pub use selftest::{run_all, CriterionResult};
