//! Scenario configuration, execution and reporting for kahlerlab verification runs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod config;
pub mod error;
pub mod registry;
pub mod report;
pub mod run;
pub mod scan;

pub use checks::Check;
pub use config::{Format, ScenarioConfig};
pub use error::{CliError, Result};
pub use report::{emit_report, VerificationReport};
pub use run::{run_scenario, RunOptions};
pub use scan::{soliton_scan, ScanOutcome};
