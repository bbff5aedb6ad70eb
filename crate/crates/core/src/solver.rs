//! Conservative finite-volume evolution of the density.
//!
//! The flux through an interior interface is `Φ = −(∂ₓn + b·n)` with `b` the
//! boundary trace; both end fluxes vanish, so the update telescopes and the
//! discrete mass is conserved to round-off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DensityField;
use crate::tridiag::solve_in_place;

/// Guard for the CFL division when the trace vanishes.
pub const TRACE_FLOOR: f64 = 1e-14;

/// Interface discretization of the drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Exponentially fitted flux, implicit as a whole; exponentials are exact
    /// discrete equilibria.
    #[default]
    Fitted,
    /// Implicit diffusion with explicit first-order upwind drift.
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub trace_blowup_threshold: f64,
    pub theta: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Extra fixed-point passes on the trace within a step; 0 keeps it lagged.
    pub picard_iterations: usize,
    pub picard_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: 0.5,
            dt_max: 1e-2,
            dt_min: 1e-12,
            trace_blowup_threshold: 1e6,
            theta: 1.0,
            t_end: 1.0,
            scheme: Scheme::Fitted,
            picard_iterations: 0,
            picard_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::config(msg));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return fail(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_max && self.dt_max.is_finite()) {
            return fail(format!("need 0 < dt_min < dt_max, got {} and {}", self.dt_min, self.dt_max));
        }
        if !(self.trace_blowup_threshold > 0.0) {
            return fail("trace_blowup_threshold must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return fail(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return fail(format!("t_end must be finite and nonnegative, got {}", self.t_end));
        }
        if self.picard_iterations > 5 {
            return fail("at most 5 Picard iterations are supported".into());
        }
        Ok(())
    }
}

/// Quadratic extrapolation of the first three cell averages to `x = 0`,
/// clamped at zero.
pub fn boundary_trace(field: &DensityField) -> Result<f64> {
    trace_from_values(field.values())
}

pub(crate) fn trace_from_values(v: &[f64]) -> Result<f64> {
    if v.len() < 3 {
        return Err(Error::Grid(format!("trace extrapolation needs 3 cells, got {}", v.len())));
    }
    Ok(((11.0 * v[0] - 7.0 * v[1] + 2.0 * v[2]) / 6.0).max(0.0))
}

/// Bernoulli function `z/(eᶻ − 1)`.
pub(crate) fn bernoulli(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        z / z.exp_m1()
    }
}

/// Weights `(p, q)` of the fitted interface flux `−(p·n_right − q·n_left)/dx`.
pub(crate) fn fitted_weights(b: f64, dx: f64) -> (f64, f64) {
    let z = b * dx;
    (bernoulli(-z), bernoulli(z))
}

/// Proposed time step for trace `b` on spacing `dx`.
pub fn proposed_dt(cfg: &SolverConfig, b: f64, dx: f64) -> f64 {
    let mut dt = cfg.dt_max.min(cfg.cfl * dx / b.max(TRACE_FLOOR));
    if cfg.theta < 1.0 {
        dt = dt.min(cfg.cfl * dx * dx / 2.0);
    }
    dt
}

/// Tridiagonal operator `A` with `dn/dt = A·n`, split into an implicit part
/// (stored by bands) and, for upwind, an explicit drift.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Operator {
    fn assemble(cells: usize, dx: f64, b: f64, scheme: Scheme) -> Self {
        let mut op = Operator {
            lower: vec![0.0; cells],
            diag: vec![0.0; cells],
            upper: vec![0.0; cells],
        };
        let (p, q) = match scheme {
            Scheme::Fitted => fitted_weights(b, dx),
            Scheme::Upwind => (1.0, 1.0),
        };
        let (p, q) = (p / (dx * dx), q / (dx * dx));
        for j in 1..cells {
            op.upper[j - 1] += p;
            op.diag[j - 1] -= q;
            op.diag[j] -= p;
            op.lower[j] += q;
        }
        op
    }

    fn apply(&self, n: &[f64], out: &mut [f64]) {
        let len = n.len();
        for i in 0..len {
            let mut v = self.diag[i] * n[i];
            if i > 0 {
                v += self.lower[i] * n[i - 1];
            }
            if i + 1 < len {
                v += self.upper[i] * n[i + 1];
            }
            out[i] = v;
        }
    }
}

/// Explicit upwind drift `b·(n_{i+1} − n_i)/dx` with a zero flux at both ends.
fn upwind_drift(n: &[f64], b: f64, dx: f64, out: &mut [f64]) {
    let len = n.len();
    for i in 0..len {
        let inflow = if i + 1 < len { n[i + 1] } else { 0.0 };
        let outflow = if i > 0 { n[i] } else { 0.0 };
        out[i] = b * (inflow - outflow) / dx;
    }
}

/// One θ-step of `dn/dt = A(b)·n` with frozen `b` and step `dt`.
pub(crate) fn advance(values: &[f64], dx: f64, b: f64, dt: f64, cfg: &SolverConfig, time: f64) -> Result<Vec<f64>> {
    let cells = values.len();
    let op = Operator::assemble(cells, dx, b, cfg.scheme);
    let theta = cfg.theta;
    let mut rhs = values.to_vec();
    let mut tmp = vec![0.0; cells];
    if theta < 1.0 {
        op.apply(values, &mut tmp);
        for (r, a) in rhs.iter_mut().zip(&tmp) {
            *r += (1.0 - theta) * dt * a;
        }
    }
    if cfg.scheme == Scheme::Upwind {
        upwind_drift(values, b, dx, &mut tmp);
        for (r, a) in rhs.iter_mut().zip(&tmp) {
            *r += dt * a;
        }
    }
    let lower: Vec<f64> = op.lower.iter().map(|a| -theta * dt * a).collect();
    let upper: Vec<f64> = op.upper.iter().map(|a| -theta * dt * a).collect();
    let diag: Vec<f64> = op.diag.iter().map(|a| 1.0 - theta * dt * a).collect();
    let mut scratch = Vec::new();
    solve_in_place(&lower, &diag, &upper, &mut rhs, &mut scratch).ok_or_else(|| Error::Numerical {
        time,
        message: "vanishing pivot in the tridiagonal solve".into(),
    })?;
    sanitize(&mut rhs, time)?;
    Ok(rhs)
}

/// Rejects NaN and genuine negativity; zeroes round-off negatives.
fn sanitize(values: &mut [f64], time: f64) -> Result<()> {
    let max = values.iter().copied().fold(0.0, f64::max);
    for (i, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::Numerical {
                time,
                message: format!("non-finite value in cell {i}"),
            });
        }
        if *v < 0.0 {
            if *v < -1e-12 * max {
                return Err(Error::Numerical {
                    time,
                    message: format!("positivity lost in cell {i} (value {v:e})"),
                });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Result of a single step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub field: DensityField,
    /// Trace of the incoming field.
    pub trace: f64,
    pub dt: f64,
}

/// One step with the CFL-proposed time step.
pub fn step(field: &DensityField, cfg: &SolverConfig) -> Result<StepOutcome> {
    let b = boundary_trace(field)?;
    let dt = proposed_dt(cfg, b, field.grid().dx());
    step_with_dt(field, cfg, dt)
}

/// One step of prescribed length; `dt` is not checked against the CFL bound.
pub fn step_with_dt(field: &DensityField, cfg: &SolverConfig, dt: f64) -> Result<StepOutcome> {
    let trace = boundary_trace(field)?;
    let dx = field.grid().dx();
    let time = field.time();
    let mut values = advance(field.values(), dx, trace, dt, cfg, time)?;
    let mut b = trace;
    for _ in 0..cfg.picard_iterations {
        let next = trace_from_values(&values)?;
        if (next - b).abs() <= cfg.picard_tol * b.max(1.0) {
            break;
        }
        b = next;
        values = advance(field.values(), dx, b, dt, cfg, time)?;
    }
    Ok(StepOutcome {
        field: DensityField::from_parts_unchecked(*field.grid(), values, time + dt),
        trace,
        dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub trace: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Completed,
    BlewUp { t_detect: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSeries {
    pub samples: Vec<TraceSample>,
    pub status: RunStatus,
}

impl TraceSeries {
    /// `Σ trace·dt` over steps taken before `t` (left Riemann sum).
    pub fn integrated_trace(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for s in &self.samples {
            if s.t >= t {
                break;
            }
            acc += s.trace * s.dt.min(t - s.t);
        }
        acc
    }

    pub fn max_trace(&self) -> f64 {
        self.samples.iter().map(|s| s.trace).fold(0.0, f64::max)
    }
}

/// Status implied by a trace series: the first sample whose trace exceeds
/// the threshold or whose step falls below `dt_min` marks the blow-up. The
/// step that lands on `t_end` may be shortened and is exempt.
pub fn detect_blowup(series: &TraceSeries, cfg: &SolverConfig) -> RunStatus {
    let end_tol = 1e-12 * cfg.t_end.max(1.0);
    for s in &series.samples {
        let final_step = s.t + s.dt >= cfg.t_end - end_tol;
        if s.trace > cfg.trace_blowup_threshold || (s.dt < cfg.dt_min && !final_step) {
            return RunStatus::BlewUp { t_detect: s.t };
        }
    }
    match series.status {
        RunStatus::BlewUp { .. } | RunStatus::Running => RunStatus::Running,
        RunStatus::Completed => RunStatus::Completed,
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<DensityField>,
    pub series: TraceSeries,
    /// State when stepping stopped.
    pub last: DensityField,
    /// Largest relative mass change of a single step.
    pub max_step_mass_drift: f64,
}

impl Trajectory {
    pub fn status(&self) -> RunStatus {
        self.series.status
    }
}

/// Validated, sorted output times within `[0, t_end]`.
pub fn checked_output_times(times: &[f64], t_end: f64) -> Result<Vec<f64>> {
    let mut out = times.to_vec();
    if out.iter().any(|t| !(t.is_finite() && *t >= 0.0 && *t <= t_end * (1.0 + 1e-12))) {
        return Err(Error::config(format!("output times must lie in [0, {t_end}]")));
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t_end.max(1.0));
    Ok(out)
}

/// Steps from `field0` to `t_end` or blow-up, emitting snapshots at
/// `output_times` by linear interpolation between bracketing steps.
pub fn run(field0: &DensityField, cfg: &SolverConfig, output_times: &[f64]) -> Result<Trajectory> {
    cfg.validate()?;
    let outputs = checked_output_times(output_times, cfg.t_end)?;
    let dx = field0.grid().dx();
    let mass0 = field0.mass();
    let mut snapshots = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    let mut samples = Vec::new();
    let mut current = field0.clone();
    let mut max_drift = 0.0_f64;
    let end_tol = 1e-12 * cfg.t_end.max(1.0);

    let emit_at = |snapshots: &mut Vec<DensityField>, next_out: &mut usize, a: &DensityField, b: Option<&DensityField>| {
        while *next_out < outputs.len() {
            let to = outputs[*next_out];
            let field = match b {
                None if (to - a.time()).abs() <= end_tol => a.clone().with_time(to),
                Some(b) if to <= b.time() + end_tol => {
                    let span = b.time() - a.time();
                    let w = if span > 0.0 { ((to - a.time()) / span).clamp(0.0, 1.0) } else { 1.0 };
                    a.lerp(b, w).with_time(to)
                }
                _ => break,
            };
            snapshots.push(field);
            *next_out += 1;
        }
    };

    emit_at(&mut snapshots, &mut next_out, &current, None);
    let mut status = RunStatus::Running;
    while status == RunStatus::Running {
        let t = current.time();
        if t >= cfg.t_end - end_tol {
            status = RunStatus::Completed;
            break;
        }
        let b = boundary_trace(&current)?;
        let dt_cfl = proposed_dt(cfg, b, dx);
        if b > cfg.trace_blowup_threshold || dt_cfl < cfg.dt_min {
            samples.push(TraceSample { t, trace: b, dt: dt_cfl });
            status = RunStatus::BlewUp { t_detect: t };
            break;
        }
        let dt = dt_cfl.min(cfg.t_end - t);
        let mut out = step_with_dt(&current, cfg, dt)?;
        if cfg.t_end - out.field.time() <= end_tol {
            out.field = out.field.with_time(cfg.t_end);
        }
        let before = current.mass();
        let after = out.field.mass();
        if before > 0.0 {
            max_drift = max_drift.max((after - before).abs() / before);
        }
        samples.push(TraceSample { t, trace: b, dt });
        emit_at(&mut snapshots, &mut next_out, &current, Some(&out.field));
        current = out.field;
    }
    if status == RunStatus::Completed {
        samples.push(TraceSample {
            t: current.time(),
            trace: boundary_trace(&current)?,
            dt: 0.0,
        });
    }
    debug_assert!(mass0 >= 0.0);
    Ok(Trajectory {
        snapshots,
        series: TraceSeries { samples, status },
        last: current,
        max_step_mass_drift: max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::profiles::ExponentialProfile;

    fn cfg(t_end: f64) -> SolverConfig {
        SolverConfig {
            t_end,
            dt_max: 0.01,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn trace_of_constant_and_zero() {
        let g = Grid::new(1.0, 10).unwrap();
        let c = DensityField::new(g, vec![2.5; 10], 0.0).unwrap();
        assert!((boundary_trace(&c).unwrap() - 2.5).abs() < 1e-14);
        assert_eq!(boundary_trace(&DensityField::zeros(g)).unwrap(), 0.0);
        let tiny = Grid::new(1.0, 2).unwrap();
        assert!(boundary_trace(&DensityField::zeros(tiny)).is_err());
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = Grid::new(5.0, 50).unwrap();
        let out = step(&DensityField::zeros(g), &cfg(1.0)).unwrap();
        assert!(out.field.values().iter().all(|v| *v == 0.0));
        assert_eq!(out.trace, 0.0);
    }

    #[test]
    fn bernoulli_identity() {
        for &z in &[1e-10, 1e-3, 0.5, 3.0] {
            assert!((bernoulli(-z) - bernoulli(z) - z).abs() < 1e-12);
        }
    }

    #[test]
    fn step_conserves_mass() {
        let g = Grid::new(20.0, 400).unwrap();
        let nu = ExponentialProfile::with_mass(2.0, 1.7).unwrap();
        let f = DensityField::from_profile(g, &nu).unwrap();
        for scheme in [Scheme::Fitted, Scheme::Upwind] {
            let c = SolverConfig { scheme, ..cfg(1.0) };
            let out = step(&f, &c).unwrap();
            assert!((out.field.mass() - f.mass()).abs() <= 1e-13 * f.mass());
        }
    }

    #[test]
    fn zero_horizon_returns_initial_snapshot() {
        let g = Grid::new(10.0, 100).unwrap();
        let f = DensityField::from_profile(g, &ExponentialProfile::new(1.0).unwrap()).unwrap();
        let traj = run(&f, &cfg(0.0), &[0.0]).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.snapshots[0].values(), f.values());
        assert_eq!(traj.status(), RunStatus::Completed);
    }

    #[test]
    fn detection_on_synthetic_series() {
        let c = SolverConfig {
            trace_blowup_threshold: 10.0,
            t_end: 10.0,
            ..SolverConfig::default()
        };
        let samples = (0..8)
            .map(|k| TraceSample {
                t: k as f64,
                trace: 2f64.powi(k),
                dt: 1.0,
            })
            .collect();
        let s = TraceSeries {
            samples,
            status: RunStatus::Running,
        };
        assert_eq!(detect_blowup(&s, &c), RunStatus::BlewUp { t_detect: 4.0 });
    }
}
