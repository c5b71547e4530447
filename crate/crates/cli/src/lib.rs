//! Scenario runner and report writer behind the `qhe-limits` binary.

pub mod error;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::CliError;
pub use report::{all_pass, emit_report, render, Format, ReportRow};
pub use runner::{run_all, run_scenario, RunOptions};
pub use scenario::{parse_scenarios, Scenario, ScenarioFile, Task};
