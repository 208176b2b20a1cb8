//! Command-line front end: scenario files, task dispatch and reports.

pub mod report;
pub mod run;
pub mod scenario;

pub use report::{emit_report, render, Format, Report, SCHEMA};
pub use run::{execute, request_from_scenario, run_cli, run_request, Cli, Request};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};
