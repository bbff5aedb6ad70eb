use std::path::Path;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr_like::gaussian;

use halfline_drift::harness::io::{load_run, REPORT_JSON};
use halfline_drift::harness::{
    check_artifacts, fit_rate, run_scenario, CheckKind, RateModel, ScenarioConfig, Status, TheoremReport,
};
use halfline_drift::profiles::blow_up_time_bound;
use halfline_drift::solver::RunStatus;

/// Box–Muller on top of `rand`, enough for a noise test.
mod rand_distr_like {
    use rand::Rng;

    pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }
}

const SMALL_CRITICAL: &str = r#"
regime = "critical"
initial = "family=exponential rate=1"
partner = "family=exponential rate=2"
mass = 1.0
x_max = 20.0
cells = 200
t_end = 1.0
output_every = 0.1
"#;

fn small(text: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(text).unwrap()
}

#[test]
fn malformed_configs_are_rejected() {
    let cases = [
        "regime = \"critical\"\n",
        &SMALL_CRITICAL.replace("cells = 200", "cells = 2"),
        &SMALL_CRITICAL.replace("mass = 1.0", "mass = 0.5"),
        &SMALL_CRITICAL.replace("t_end = 1.0", "t_end = -1.0"),
        &format!("{SMALL_CRITICAL}colour = \"blue\"\n"),
        &SMALL_CRITICAL.replace("rate=1", "rate=one"),
        &SMALL_CRITICAL.replace("exponential rate=1", "spiral rate=1"),
    ];
    for text in cases {
        assert!(ScenarioConfig::from_toml_str(text).is_err(), "accepted:\n{text}");
    }
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = small(SMALL_CRITICAL);
    let back = ScenarioConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg.to_toml().unwrap(), back.to_toml().unwrap());
}

#[test]
fn fit_rate_tolerates_one_percent_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let power: Vec<(f64, f64)> = (0..200)
        .map(|k| {
            let t = 5.0 + 45.0 * k as f64 / 199.0;
            (t, 2.0 * (1.0 + 2.0 * t).powf(-1.5) * (1.0 + 0.01 * gaussian(&mut rng)))
        })
        .collect();
    let f = fit_rate(&power, RateModel::Power, (5.0, 50.0)).unwrap();
    assert!((f.slope + 1.5).abs() < 0.05, "power {}", f.slope);

    let exp: Vec<(f64, f64)> = (0..200)
        .map(|k| {
            let tau = 1.0 + 2.0 * k as f64 / 199.0;
            (tau, 0.3 * (-2.0 * tau).exp() * (1.0 + 0.01 * gaussian(&mut rng)))
        })
        .collect();
    let f = fit_rate(&exp, RateModel::Exponential, (1.0, 3.0)).unwrap();
    assert!((f.slope + 2.0).abs() < 0.05, "exponential {}", f.slope);
}

#[test]
fn steady_state_report_passes() {
    let out = run_scenario(&small(SMALL_CRITICAL), None).unwrap();
    assert!(out.report.all_pass(), "{}", out.report.to_text());
    assert!(out.report.verdict(CheckKind::TraceLowerBound).is_none());
    assert_eq!(out.report.verdict(CheckKind::Comparison).unwrap().status, Status::Pass);
}

#[test]
fn unordered_pair_is_not_applicable() {
    let text = SMALL_CRITICAL.replace("family=exponential rate=2", "family=bump rate=4").replace("t_end = 1.0", "t_end = 0.2");
    let out = run_scenario(&small(&text), None).unwrap();
    let v = out.report.verdict(CheckKind::Comparison).unwrap();
    assert_eq!(v.status, Status::NotApplicable, "{}", v.detail);
}

#[test]
fn supercritical_run_blows_up_before_bound() {
    let text = r#"
regime = "supercritical"
initial = "family=exponential rate=2"
mass = 2.0
x_max = 12.5
cells = 2500
dt_max = 0.001
t_end = 1.5
output_every = 0.01
checks = ["mass_conservation", "blow_up_bound", "first_moment_law"]
"#;
    let out = run_scenario(&small(text), None).unwrap();
    let RunStatus::BlewUp { t_detect } = out.series.status else {
        panic!("no blow-up: {:?}", out.series.status)
    };
    let (bound, _) = blow_up_time_bound(2.0, 1.0).unwrap();
    assert!((bound - 7.0 / 6.0).abs() < 1e-15);
    assert!(t_detect <= bound);
    assert!(out.report.all_pass(), "{}", out.report.to_text());
}

fn read_report(dir: &Path) -> TheoremReport {
    serde_json::from_str(&std::fs::read_to_string(dir.join(REPORT_JSON)).unwrap()).unwrap()
}

#[test]
fn stored_artifacts_reproduce_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(SMALL_CRITICAL);
    let out = run_scenario(&cfg, Some(dir.path())).unwrap();
    let stored = load_run(dir.path()).unwrap();
    assert_eq!(stored.snapshots.len(), out.snapshots.len());
    let first = read_report(dir.path());
    let again = check_artifacts(dir.path()).unwrap();
    assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&again).unwrap());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_halfline-drift"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("critical.toml");
    std::fs::write(&config, SMALL_CRITICAL).unwrap();
    let run_dir = dir.path().join("run");

    let status = cli().args(["run", "--config"]).arg(&config).arg("--out").arg(&run_dir).args(["--cells", "200", "--t-end", "0.5"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let status = cli().args(["check", "--out"]).arg(&run_dir).status().unwrap();
    assert_eq!(status.code(), Some(0));

    // too coarse for the stationarity tolerance
    let status = cli().args(["run", "--config"]).arg(&config).arg("--out").arg(dir.path().join("coarse")).args(["--cells", "100", "--t-end", "0.5"]).status().unwrap();
    assert_eq!(status.code(), Some(1));

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "regime = 3\n").unwrap();
    let status = cli().args(["run", "--config"]).arg(&broken).arg("--out").arg(dir.path().join("b")).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let table = dir.path().join("table.csv");
    let status = cli().args(["profile", "family=exponential rate=2", "--points", "11", "--out"]).arg(&table).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&table).unwrap().lines().count(), 12);
}
