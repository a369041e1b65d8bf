//! Scenario files, batch trials, traces and result tables.

mod report;
mod scenario;
mod trials;

pub use report::{report, ReportError};
pub use scenario::{
    load_scenario, parse_scenario_json, PerceptionConfig, Scenario, ScenarioError, ScenarioFile,
    SCENARIO_FORMAT_VERSION,
};
pub use trials::{run_trial, run_trials, Metrics, TrialRecord, TRACE_FORMAT_VERSION};
