//! Experiment harness over `lpp_core`: configuration, deterministic replica
//! fan-out, estimate tables with confidence intervals, log-log exponent fits
//! and CSV/JSON output.

pub mod config;
pub mod error;
pub mod runner;
pub mod suites;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat, Radius, RawConfig};
pub use error::{ExperimentError, Result};
pub use runner::Runner;
pub use suites::{run, run_with, write_table};
pub use table::{Check, EstimateRow, SlopeFit, Table, Value};
