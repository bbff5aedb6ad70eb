//! Scenario configuration, orchestration, theorem checks and reports.

pub mod checks;
pub mod config;
pub mod datum;
pub mod fit;
pub mod io;
pub mod report;
pub mod scenario;
pub mod tables;

pub use checks::{check_suite, CheckKind, Evidence};
pub use config::{Regime, ScenarioConfig};
pub use datum::InitialDatum;
pub use fit::{fit_rate, linear_fit, LinearFit, RateModel};
pub use report::{Status, TheoremReport, Verdict};
pub use scenario::{check_artifacts, run_scenario, sweep, ScenarioOutcome};
pub use tables::profile_table;
