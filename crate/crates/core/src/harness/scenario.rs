//! Run orchestration: datum, solver, diagnostics, checks and artifacts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functionals::{corrected_gaussian_potential, diagnose, log_sobolev_check, lyapunov_critical_step, DiagnosticsRecord, Target};
use crate::grid::DensityField;
use crate::harness::checks::{check_suite, Evidence};
use crate::harness::config::{Regime, ScenarioConfig};
use crate::harness::datum::InitialDatum;
use crate::harness::io;
use crate::harness::report::TheoremReport;
use crate::integrated::{cumulate, run_integrated, CumulativeField};
use crate::profiles::{critical_alpha, solve_subcritical_alpha};
use crate::solver::{run, TraceSeries};

/// Everything produced by one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub snapshots: Vec<DensityField>,
    pub series: TraceSeries,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub partner: Option<Vec<CumulativeField>>,
    pub max_step_mass_drift: f64,
    pub report: TheoremReport,
}

impl ScenarioOutcome {
    pub fn evidence(&self) -> Evidence<'_> {
        Evidence {
            config: &self.config,
            snapshots: &self.snapshots,
            series: &self.series,
            diagnostics: &self.diagnostics,
            partner: self.partner.as_deref(),
            max_step_mass_drift: Some(self.max_step_mass_drift),
        }
    }
}

/// Configuration as echoed into the artifacts: derived defaults made explicit.
fn resolved(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut r = cfg.clone();
    r.dt_min = Some(cfg.dt_min());
    r.output_times = Some(cfg.resolved_output_times());
    r.output_every = None;
    r
}

/// The initial field of the configured datum.
pub fn initial_field(cfg: &ScenarioConfig) -> Result<DensityField> {
    InitialDatum::parse(&cfg.initial)?.field(cfg.grid()?, cfg.mass)
}

/// Diagnostics target for the regime, from the initial field.
pub fn target(cfg: &ScenarioConfig, field0: &DensityField) -> Result<Target> {
    Ok(match cfg.regime {
        Regime::Subcritical => Target::Subcritical {
            alpha: solve_subcritical_alpha(cfg.mass, 1e-13)?,
        },
        Regime::Critical => Target::Critical {
            alpha: critical_alpha(crate::functionals::moment(field0, 1)?)?,
        },
        Regime::Supercritical => Target::Supercritical,
    })
}

/// Per-snapshot diagnostics plus, at critical mass, the history-dependent
/// `c(t)`, `F(t)` and the log-Sobolev residual against `G_{0,c/2}`.
pub fn compute_diagnostics(cfg: &ScenarioConfig, snapshots: &[DensityField], series: &TraceSeries) -> Result<Vec<DiagnosticsRecord>> {
    let first = snapshots.first().ok_or_else(|| Error::Precondition("no snapshots".into()))?;
    let target = target(cfg, first)?;
    let mut records = snapshots
        .iter()
        .map(|s| diagnose(s, target, cfg.quantiles))
        .collect::<Result<Vec<_>>>()?;
    if let Target::Critical { alpha } = target {
        critical_history(&mut records, snapshots, series, alpha, cfg.mass)?;
    }
    Ok(records)
}

fn critical_history(
    records: &mut [DiagnosticsRecord],
    snapshots: &[DensityField],
    series: &TraceSeries,
    alpha: f64,
    mass: f64,
) -> Result<()> {
    let times: Vec<f64> = records.iter().map(|r| r.time).collect();
    let m2_at = |t: f64| -> f64 {
        let k = times.partition_point(|&s| s <= t).clamp(1, times.len().max(2) - 1);
        if times.len() < 2 {
            return records[0].m2;
        }
        let (a, b) = (&records[k - 1], &records[k]);
        let w = ((t - a.time) / (b.time - a.time)).clamp(0.0, 1.0);
        a.m2 + w * (b.m2 - a.m2)
    };
    // c(t) by explicit Euler on the solver's steps, split at output times
    let mut c_at = Vec::with_capacity(times.len());
    let mut c = 1.0;
    let mut t = 0.0;
    let mut next = 0;
    while next < times.len() && times[next] <= t {
        c_at.push(c);
        next += 1;
    }
    for s in series.samples.iter().filter(|s| s.dt > 0.0) {
        let end = s.t + s.dt;
        let tol = 1e-9 * s.dt;
        while t < end - tol && next < times.len() {
            let b = if times[next] <= end + tol { times[next] } else { end };
            if b > t {
                let (_, c_next) = lyapunov_critical_step(0.0, m2_at(t), alpha, c, b - t, b);
                c = c_next;
                t = b;
            }
            if t >= times[next] - tol {
                c_at.push(c);
                next += 1;
            } else {
                break;
            }
        }
        if next == times.len() {
            break;
        }
    }
    for (k, (rec, snap)) in records.iter_mut().zip(snapshots).enumerate() {
        let Some(&c) = c_at.get(k) else { break };
        let h = rec.h_alpha.ok_or_else(|| Error::Precondition("h_alpha missing".into()))?;
        rec.c = Some(c);
        rec.lyapunov_f = Some(h + c * rec.m2 / 2.0);
        if rec.trace > 0.0 {
            let v = corrected_gaussian_potential(rec.trace, c, mass, snap.grid())?;
            rec.lsi_residual = Some(log_sobolev_check(snap, v, c / 2.0)?);
        }
    }
    Ok(())
}

fn partner_run(cfg: &ScenarioConfig, spec: &str) -> Result<Vec<CumulativeField>> {
    let field = InitialDatum::parse(spec)?.field(cfg.grid()?, cfg.mass)?;
    let traj = run_integrated(&cumulate(&field), &cfg.solver_config()?, &cfg.resolved_output_times())?;
    Ok(traj.snapshots)
}

/// Runs one scenario; with `out`, artifacts are written there (the
/// configuration echo first, so failed runs keep their inputs).
pub fn run_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let config = resolved(cfg);
    if let Some(dir) = out {
        io::write_preamble(dir, &config)?;
    }
    let field0 = initial_field(&config)?;
    let traj = run(&field0, &config.solver_config()?, &config.resolved_output_times())?;
    if let Some(dir) = out {
        io::write_trace(dir, &traj.series, traj.max_step_mass_drift)?;
        io::write_snapshots(dir, &traj.snapshots)?;
    }
    let partner = match &config.partner {
        Some(spec) => Some(partner_run(&config, spec)?),
        None => None,
    };
    if let (Some(dir), Some(p)) = (out, &partner) {
        io::write_partner(dir, p)?;
    }
    let diagnostics = compute_diagnostics(&config, &traj.snapshots, &traj.series)?;
    if let Some(dir) = out {
        io::write_diagnostics(dir, &diagnostics)?;
    }
    let report = check_suite(&Evidence {
        config: &config,
        snapshots: &traj.snapshots,
        series: &traj.series,
        diagnostics: &diagnostics,
        partner: partner.as_deref(),
        max_step_mass_drift: Some(traj.max_step_mass_drift),
    });
    if let Some(dir) = out {
        io::write_report(dir, &report)?;
    }
    Ok(ScenarioOutcome {
        config,
        snapshots: traj.snapshots,
        series: traj.series,
        diagnostics,
        partner,
        max_step_mass_drift: traj.max_step_mass_drift,
        report,
    })
}

/// Re-evaluates the checks on an artifact directory and rewrites its report.
pub fn check_artifacts(dir: &Path) -> Result<TheoremReport> {
    let stored = io::load_run(dir)?;
    let diagnostics = compute_diagnostics(&stored.config, &stored.snapshots, &stored.series)?;
    let report = check_suite(&Evidence {
        config: &stored.config,
        snapshots: &stored.snapshots,
        series: &stored.series,
        diagnostics: &diagnostics,
        partner: stored.partner.as_deref(),
        max_step_mass_drift: Some(stored.summary.max_step_mass_drift),
    });
    io::write_report(dir, &report)?;
    Ok(report)
}

/// Config files (`*.toml`) in `dir`, sorted by name.
pub fn config_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "toml") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Runs every config in parallel, each into `out/<file stem>`.
pub fn sweep(configs: &[PathBuf], out: &Path, cells: Option<usize>, t_end: Option<f64>) -> Vec<(PathBuf, Result<TheoremReport>)> {
    configs
        .par_iter()
        .map(|path| {
            let result = ScenarioConfig::from_path(path)
                .and_then(|c| c.with_overrides(cells, t_end))
                .and_then(|c| {
                    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    run_scenario(&c, Some(&out.join(stem)))
                })
                .map(|o| o.report);
            (path.clone(), result)
        })
        .collect()
}
