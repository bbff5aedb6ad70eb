//! The cumulative variable `N(t,x) = ∫₀ˣ n(t,y) dy` and its evolution
//!
//! ```text
//! ∂t N − ∂xx N − ∂x N(t,0)·∂x N = 0,   N(t,0) = 0,
//! ```
//!
//! together with the order checks behind the comparison principle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DensityField, Grid};
use crate::solver::{fitted_weights, proposed_dt, RunStatus, Scheme, SolverConfig, TraceSample, TraceSeries};
use crate::tridiag::solve_in_place;

/// Node values of `N` at the interfaces `0..=cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeField {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
}

impl CumulativeField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.cells() + 1 {
            return Err(Error::Grid(format!(
                "{} node values for a grid of {} cells",
                values.len(),
                grid.cells()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::domain("a cumulative must vanish at the origin"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("cumulative values must be finite"));
        }
        Ok(CumulativeField { grid, values, time })
    }

    /// Node values of a closed-form cumulative.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let mut values: Vec<f64> = (0..=grid.cells()).map(|j| f(grid.interface(j))).collect();
        values[0] = 0.0;
        CumulativeField::new(grid, values, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn mass(&self) -> f64 {
        *self.values.last().expect("at least two nodes")
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// `J = ∫₀^{x_max} (M − N) dx` by the trapezoidal rule on the nodes,
    /// which equals the midpoint first moment of the cell averages.
    pub fn first_moment(&self) -> f64 {
        let m = self.mass();
        let dx = self.grid.dx();
        let v = &self.values;
        let interior: f64 = v[1..v.len() - 1].iter().map(|n| m - n).sum();
        dx * (interior + 0.5 * (m - v[0]) + 0.5 * (m - v[v.len() - 1]))
    }

    /// Cell averages recovered by differencing.
    pub fn density(&self) -> Result<DensityField> {
        let dx = self.grid.dx();
        let values: Vec<f64> = self.values.windows(2).map(|w| ((w[1] - w[0]) / dx).max(0.0)).collect();
        DensityField::new(self.grid, values, self.time)
    }

    /// `∂ₓN(t,0)` by the one-sided stencil matching [`crate::solver::boundary_trace`].
    pub fn boundary_slope(&self) -> Result<f64> {
        let v = &self.values;
        if v.len() < 4 {
            return Err(Error::Grid("boundary slope needs 3 cells".into()));
        }
        let dx = self.grid.dx();
        Ok(((-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * dx)).max(0.0))
    }

    /// Linear interpolation between nodes, `M` beyond `x_max`.
    pub fn interpolate(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s = x / self.grid.dx();
        let j = s.floor() as usize;
        if j >= self.grid.cells() {
            return self.mass();
        }
        let w = s - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| (self.grid.interface(j), *v))
            .collect()
    }

    fn lerp(&self, other: &CumulativeField, w: f64) -> CumulativeField {
        CumulativeField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| (1.0 - w) * a + w * b).collect(),
            time: (1.0 - w) * self.time + w * other.time,
        }
    }
}

/// `N_j = dx·Σ_{i<j} n_i`; the last node equals the discrete mass exactly.
pub fn cumulate(field: &DensityField) -> CumulativeField {
    let dx = field.grid().dx();
    let mut values = Vec::with_capacity(field.values().len() + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for v in field.values() {
        acc += v;
        values.push(dx * acc);
    }
    CumulativeField {
        grid: *field.grid(),
        values,
        time: field.time(),
    }
}

fn advance_nodes(values: &[f64], dx: f64, b: f64, dt: f64, cfg: &SolverConfig, time: f64) -> Result<Vec<f64>> {
    let nodes = values.len();
    let interior = nodes - 2;
    let (p, q) = match cfg.scheme {
        Scheme::Fitted => fitted_weights(b, dx),
        Scheme::Upwind => (1.0, 1.0),
    };
    let (p, q) = (p / (dx * dx), q / (dx * dx));
    let theta = cfg.theta;
    let left = values[0];
    let right = values[nodes - 1];
    let mut rhs = Vec::with_capacity(interior);
    for j in 1..nodes - 1 {
        let mut r = values[j];
        let a = p * (values[j + 1] - values[j]) - q * (values[j] - values[j - 1]);
        r += (1.0 - theta) * dt * a;
        if cfg.scheme == Scheme::Upwind {
            r += dt * b * (values[j + 1] - values[j]) / dx;
        }
        rhs.push(r);
    }
    let lower = vec![-theta * dt * q; interior];
    let upper = vec![-theta * dt * p; interior];
    let diag = vec![1.0 + theta * dt * (p + q); interior];
    if interior > 0 {
        rhs[0] += theta * dt * q * left;
        rhs[interior - 1] += theta * dt * p * right;
    }
    let mut scratch = Vec::new();
    solve_in_place(&lower, &diag, &upper, &mut rhs, &mut scratch).ok_or_else(|| Error::Numerical {
        time,
        message: "vanishing pivot in the cumulative solve".into(),
    })?;
    let mut out = Vec::with_capacity(nodes);
    out.push(left);
    for v in rhs {
        if !v.is_finite() {
            return Err(Error::Numerical {
                time,
                message: "non-finite cumulative value".into(),
            });
        }
        out.push(v);
    }
    out.push(right);
    Ok(out)
}

/// One step of the cumulative equation; Dirichlet `0` at the origin and
/// the held mass at `x_max`. Returns the new field and the step used.
pub fn step_integrated(field: &CumulativeField, cfg: &SolverConfig) -> Result<(CumulativeField, f64)> {
    let b = field.boundary_slope()?;
    let dt = proposed_dt(cfg, b, field.grid.dx());
    Ok((step_integrated_with_dt(field, cfg, dt)?, dt))
}

pub fn step_integrated_with_dt(field: &CumulativeField, cfg: &SolverConfig, dt: f64) -> Result<CumulativeField> {
    let b = field.boundary_slope()?;
    let values = advance_nodes(&field.values, field.grid.dx(), b, dt, cfg, field.time)?;
    Ok(CumulativeField {
        grid: field.grid,
        values,
        time: field.time + dt,
    })
}

#[derive(Debug, Clone)]
pub struct IntegratedTrajectory {
    pub snapshots: Vec<CumulativeField>,
    pub series: TraceSeries,
    /// Whether every step kept the nodes nondecreasing.
    pub monotone: bool,
}

/// Evolves a cumulative with the same stepping and blow-up rules as the
/// density solver; snapshots by linear interpolation in time.
pub fn run_integrated(field0: &CumulativeField, cfg: &SolverConfig, output_times: &[f64]) -> Result<IntegratedTrajectory> {
    cfg.validate()?;
    let outputs = crate::solver::checked_output_times(output_times, cfg.t_end)?;
    let end_tol = 1e-12 * cfg.t_end.max(1.0);
    let dx = field0.grid.dx();
    let mut snapshots = Vec::new();
    let mut next = 0;
    let mut samples = Vec::new();
    let mut current = field0.clone();
    let mut monotone = current.is_nondecreasing();
    while next < outputs.len() && outputs[next] <= end_tol {
        snapshots.push(current.clone().with_time(outputs[next]));
        next += 1;
    }
    let status = loop {
        let t = current.time;
        if t >= cfg.t_end - end_tol {
            break RunStatus::Completed;
        }
        let b = current.boundary_slope()?;
        let dt_cfl = proposed_dt(cfg, b, dx);
        if b > cfg.trace_blowup_threshold || dt_cfl < cfg.dt_min {
            samples.push(TraceSample { t, trace: b, dt: dt_cfl });
            break RunStatus::BlewUp { t_detect: t };
        }
        let dt = dt_cfl.min(cfg.t_end - t);
        let mut new = step_integrated_with_dt(&current, cfg, dt)?;
        if cfg.t_end - new.time <= end_tol {
            new.time = cfg.t_end;
        }
        monotone &= new.is_nondecreasing();
        samples.push(TraceSample { t, trace: b, dt });
        while next < outputs.len() && outputs[next] <= new.time + end_tol {
            let w = ((outputs[next] - t) / (new.time - t)).clamp(0.0, 1.0);
            snapshots.push(current.lerp(&new, w).with_time(outputs[next]));
            next += 1;
        }
        current = new;
    };
    Ok(IntegratedTrajectory {
        snapshots,
        series: TraceSeries { samples, status },
        monotone,
    })
}

/// Outcome of comparing two cumulatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub holds: bool,
    /// `max(0, max_x (N2 − N1))`.
    pub max_violation: f64,
    pub argmax_x: f64,
}

/// Does `upper ≥ lower − slack` hold at every node?
pub fn order_check(upper: &CumulativeField, lower: &CumulativeField, slack: f64) -> Result<OrderVerdict> {
    if !upper.grid.same_as(&lower.grid) {
        return Err(Error::domain("order check between cumulatives on different grids"));
    }
    let mut worst = 0.0;
    let mut at = 0.0;
    for (j, (a, b)) in upper.values.iter().zip(&lower.values).enumerate() {
        let gap = b - a;
        if gap > worst {
            worst = gap;
            at = upper.grid.interface(j);
        }
    }
    Ok(OrderVerdict {
        holds: worst <= slack,
        max_violation: worst,
        argmax_x: at,
    })
}

/// The inflation `ε·e^{4K²t}·(1 − e^{−4Kx})`.
pub fn inflation_term(k: f64, eps: f64, t: f64, x: f64) -> f64 {
    eps * (4.0 * k * k * t).exp() * -(-4.0 * k * x).exp_m1()
}

/// Adds the inflation term to a supersolution valid on `[0, horizon]`;
/// requires `0 ≤ ε < e^{−4K²·horizon}/2`.
pub fn epsilon_inflate(nbar: &CumulativeField, k: f64, eps: f64, t: f64, horizon: f64) -> Result<CumulativeField> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::domain(format!("K must be finite and nonnegative, got {k}")));
    }
    let cap = 0.5 * (-4.0 * k * k * horizon).exp();
    if !(eps >= 0.0 && (eps < cap || eps == 0.0)) {
        return Err(Error::domain(format!("eps = {eps} outside [0, {cap:e})")));
    }
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::domain(format!("t = {t} outside [0, {horizon}]")));
    }
    let values = nbar
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| v + inflation_term(k, eps, t, nbar.grid.interface(j)))
        .collect();
    Ok(CumulativeField {
        grid: nbar.grid,
        values,
        time: nbar.time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::ExponentialProfile;
    use crate::solver::step_with_dt;

    #[test]
    fn cumulate_ends_at_mass() {
        let g = Grid::new(10.0, 100).unwrap();
        let f = DensityField::from_profile(g, &ExponentialProfile::new(1.0).unwrap()).unwrap();
        let n = cumulate(&f);
        assert_eq!(n.mass(), g.dx() * f.values().iter().sum::<f64>());
        assert!(cumulate(&DensityField::zeros(g)).values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid::new(5.0, 50).unwrap();
        let n = cumulate(&DensityField::zeros(g));
        let (out, _) = step_integrated(&n, &SolverConfig::default()).unwrap();
        assert!(out.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn matches_density_solver() {
        let g = Grid::new(20.0, 200).unwrap();
        let f = DensityField::from_fn(g, |x| 2.0 * x * (-x).exp() * (1.0 + 0.3 * (3.0 * x).sin())).unwrap();
        let cfg = SolverConfig::default();
        let dt = 0.01;
        let via_density = cumulate(&step_with_dt(&f, &cfg, dt).unwrap().field);
        let via_nodes = step_integrated_with_dt(&cumulate(&f), &cfg, dt).unwrap();
        for (a, b) in via_density.values().iter().zip(via_nodes.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn inflation_examples() {
        let direct = 0.1 * 0.2f64.exp() * (1.0 - (-4.0f64).exp());
        assert!((inflation_term(1.0, 0.1, 0.05, 1.0) - direct).abs() < 1e-15);
        assert!((inflation_term(2.0, 0.3, 0.0, 1e3) - 0.3).abs() < 1e-15);
        let g = Grid::new(1.0, 4).unwrap();
        let n = CumulativeField::from_fn(g, |x| x).unwrap();
        assert_eq!(epsilon_inflate(&n, 1.0, 0.0, 0.5, 1.0).unwrap(), n);
        assert!(epsilon_inflate(&n, 1.0, 0.5, 0.5, 1.0).is_err());
    }
}
