//! Artifact layout, writers and readers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::DiagnosticsRecord;
use crate::grid::DensityField;
use crate::harness::config::ScenarioConfig;
use crate::harness::report::TheoremReport;
use crate::integrated::{cumulate, CumulativeField};
use crate::rescale::to_selfsimilar;
use crate::solver::{RunStatus, TraceSample, TraceSeries};

pub const META_FILE: &str = "run.meta";
pub const SCHEMA_FILE: &str = "schema.txt";
pub const TRACE_FILE: &str = "trace.csv";
pub const STATUS_FILE: &str = "status.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const CUMULATIVE_DIR: &str = "cumulative";
pub const RESCALED_DIR: &str = "rescaled";
pub const PARTNER_DIR: &str = "partner";
pub const INDEX_FILE: &str = "index.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TEXT: &str = "report.txt";

const SCHEMA: &str = "\
run.meta            resolved scenario configuration (TOML, same keys as the input config)
status.json         run status and the largest single-step relative mass drift
trace.csv           t,trace,dt: one row per step; t is the step start, dt the step taken
                    (the last row has dt = 0 on completion, or the rejected step on blow-up)
diagnostics.csv     one row per output time:
                      time,mass,j,m2,m3      mass and moments of order 1..3
                      trace                  boundary value n(t,0)
                      entropy                ∫n log n
                      fisher,fisher_excluded ∫n(∂x log n)² and the mass fraction excluded below the floor
                      h_alpha                H(n|ν_α) (critical)
                      i_nu0,w2_nu0           I(n|ν₀) and W₂(n,ν₀) with ν₀ = trace·e^(−trace·x) (critical)
                      w2_alpha,w2_scale      W₂(n,ν_α) and the normalizing factor applied to n (critical)
                      tau                    log(1+2t) (subcritical)
                      lyapunov_l             L = H(u|G_α) + (J_u − α(1−M))²/(2(1−M)) (subcritical)
                      lyapunov_l_trace       L with u(τ,0) in place of α in the moment term (subcritical)
                      l_dissipation          ½[I(u|G_u0) + (J_u − u0(1−M))²/(1−M)] (subcritical)
                      rescaled_trace,rescaled_j  u(τ,0) and ∫y·u (subcritical)
                      lyapunov_f,c           F = H + c·m2/2 and c(t) (critical)
                      ck_residual            2M·H − ‖n − reference‖₁²
                      lsi_residual           I/(2κ) − H against the Gaussian reference
                      hwi_residual           W₂√I − H against ν₀ (critical)
                      hwi_entropy_gap        H(n|ν₀) − H(n|ν_α) (critical)
                      hwi_transport_gap      2m2 + 4/trace² − W₂(n,ν₀)² (critical)
                    empty cells are quantities that do not apply to the regime
snapshots/index.csv index,time,file
snapshots/n_K.csv   x,n: cell centres and cell averages at output time K
cumulative/N_K.csv  x,N: interface nodes and the cumulative mass
rescaled/u_K.csv    y,u,tau: self-similar frame y = x/√(1+2t), u = √(1+2t)·n
partner/N_K.csv     x,N: cumulative of the comparison partner, when configured
report.json         verdicts with measured values, bounds, tolerances and data files
report.txt          the same verdicts, one line each
";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    #[serde(flatten)]
    pub status: RunStatus,
    pub max_step_mass_drift: f64,
}

#[derive(Serialize, Deserialize)]
struct IndexRow {
    index: usize,
    time: f64,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct DensityRow {
    x: f64,
    n: f64,
}

#[derive(Serialize, Deserialize)]
struct CumulativeRow {
    x: f64,
    #[serde(rename = "N")]
    big_n: f64,
}

#[derive(Serialize)]
struct RescaledRow {
    y: f64,
    u: f64,
    tau: f64,
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| Error::io(path, e))).collect()
}

fn snapshot_name(prefix: &str, k: usize) -> String {
    format!("{prefix}_{k:04}.csv")
}

/// Writes the configuration echo and the schema; called before stepping so
/// a failed run still leaves its inputs behind.
pub fn write_preamble(dir: &Path, cfg: &ScenarioConfig) -> Result<()> {
    create_dir(dir)?;
    write_text(&dir.join(META_FILE), &cfg.to_toml()?)?;
    write_text(&dir.join(SCHEMA_FILE), SCHEMA)
}

pub fn write_trace(dir: &Path, series: &TraceSeries, max_step_mass_drift: f64) -> Result<()> {
    write_csv(&dir.join(TRACE_FILE), series.samples.iter())?;
    let summary = RunSummary {
        status: series.status,
        max_step_mass_drift,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::io(dir.join(STATUS_FILE), e))?;
    write_text(&dir.join(STATUS_FILE), &json)
}

pub fn write_snapshots(dir: &Path, snapshots: &[DensityField]) -> Result<()> {
    for sub in [SNAPSHOT_DIR, CUMULATIVE_DIR, RESCALED_DIR] {
        create_dir(&dir.join(sub))?;
    }
    let mut index = Vec::with_capacity(snapshots.len());
    for (k, s) in snapshots.iter().enumerate() {
        let name = snapshot_name("n", k);
        let g = s.grid();
        write_csv(
            &dir.join(SNAPSHOT_DIR).join(&name),
            s.values().iter().enumerate().map(|(i, v)| DensityRow { x: g.center(i), n: *v }),
        )?;
        write_cumulative(&dir.join(CUMULATIVE_DIR).join(snapshot_name("N", k)), &cumulate(s))?;
        let r = to_selfsimilar(s)?;
        let rg = r.field.grid();
        write_csv(
            &dir.join(RESCALED_DIR).join(snapshot_name("u", k)),
            r.field.values().iter().enumerate().map(|(i, u)| RescaledRow { y: rg.center(i), u: *u, tau: r.tau }),
        )?;
        index.push(IndexRow { index: k, time: s.time(), file: name });
    }
    write_csv(&dir.join(SNAPSHOT_DIR).join(INDEX_FILE), index)
}

fn write_cumulative(path: &Path, n: &CumulativeField) -> Result<()> {
    let g = n.grid();
    write_csv(path, n.values().iter().enumerate().map(|(j, v)| CumulativeRow { x: g.interface(j), big_n: *v }))
}

pub fn write_partner(dir: &Path, partner: &[CumulativeField]) -> Result<()> {
    let sub = dir.join(PARTNER_DIR);
    create_dir(&sub)?;
    let mut index = Vec::new();
    for (k, n) in partner.iter().enumerate() {
        let name = snapshot_name("N", k);
        write_cumulative(&sub.join(&name), n)?;
        index.push(IndexRow { index: k, time: n.time(), file: name });
    }
    write_csv(&sub.join(INDEX_FILE), index)
}

pub fn write_diagnostics(dir: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_csv(&dir.join(DIAGNOSTICS_FILE), records.iter())
}

pub fn write_report(dir: &Path, report: &TheoremReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::io(dir.join(REPORT_JSON), e))?;
    write_text(&dir.join(REPORT_JSON), &json)?;
    write_text(&dir.join(REPORT_TEXT), &report.to_text())
}

/// A run reloaded from its artifact directory.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub config: ScenarioConfig,
    pub snapshots: Vec<DensityField>,
    pub series: TraceSeries,
    pub summary: RunSummary,
    pub partner: Option<Vec<CumulativeField>>,
}

fn read_index(dir: &Path) -> Result<Vec<(f64, PathBuf)>> {
    Ok(read_csv::<IndexRow>(&dir.join(INDEX_FILE))?
        .into_iter()
        .map(|r| (r.time, dir.join(r.file)))
        .collect())
}

pub fn load_run(dir: &Path) -> Result<StoredRun> {
    let config = ScenarioConfig::from_toml_str(&read_text(&dir.join(META_FILE))?)?;
    let grid = config.grid()?;
    let summary: RunSummary = serde_json::from_str(&read_text(&dir.join(STATUS_FILE))?)
        .map_err(|e| Error::io(dir.join(STATUS_FILE), e))?;
    let samples: Vec<TraceSample> = read_csv(&dir.join(TRACE_FILE))?;
    let series = TraceSeries {
        samples,
        status: summary.status,
    };
    let mut snapshots = Vec::new();
    for (time, path) in read_index(&dir.join(SNAPSHOT_DIR))? {
        let rows: Vec<DensityRow> = read_csv(&path)?;
        if rows.len() != grid.cells() {
            return Err(Error::io(&path, format!("expected {} rows, found {}", grid.cells(), rows.len())));
        }
        snapshots.push(DensityField::new(grid, rows.into_iter().map(|r| r.n).collect(), time)?);
    }
    let partner_dir = dir.join(PARTNER_DIR);
    let partner = if partner_dir.is_dir() {
        let mut out = Vec::new();
        for (time, path) in read_index(&partner_dir)? {
            let rows: Vec<CumulativeRow> = read_csv(&path)?;
            out.push(CumulativeField::new(grid, rows.into_iter().map(|r| r.big_n).collect(), time)?);
        }
        Some(out)
    } else {
        None
    };
    Ok(StoredRun {
        config,
        snapshots,
        series,
        summary,
        partner,
    })
}

/// Writes `x,value` rows to `out`.
pub fn write_table<W: Write>(out: W, rows: &[(f64, f64)]) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        x: f64,
        value: f64,
    }
    let mut w = csv::Writer::from_writer(out);
    for &(x, value) in rows {
        w.serialize(Row { x, value }).map_err(|e| Error::io("<table>", e))?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))
}
