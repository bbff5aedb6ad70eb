//! Runs a scenario file through the check suite and prints the report.
//!
//! `cargo run --release --example scenario_report -- scenarios/critical_stationary.toml`

use std::path::PathBuf;

use halfline_drift::harness::{run_scenario, ScenarioConfig};

fn main() -> halfline_drift::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/critical_stationary.toml"));
    let cfg = ScenarioConfig::from_path(&path)?;
    let outcome = run_scenario(&cfg, None)?;
    print!("{}", outcome.report.to_text());
    Ok(())
}
