//! Scenario configuration: flat TOML whose keys are the field names below.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::harness::checks::CheckKind;
use crate::harness::datum::InitialDatum;
use crate::solver::{Scheme, SolverConfig};

/// Cell Péclet number `b·dx` at which the adaptive step is deemed unresolved;
/// sets the default `dt_min = cfl·dx²/PECLET_LIMIT`.
pub const PECLET_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn of_mass(mass: f64) -> Regime {
        if (mass - 1.0).abs() <= 1e-12 {
            Regime::Critical
        } else if mass < 1.0 {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

fn default_cfl() -> f64 {
    0.5
}
fn default_dt_max() -> f64 {
    0.01
}
fn default_threshold() -> f64 {
    1e6
}
fn default_theta() -> f64 {
    1.0
}
fn default_quantiles() -> usize {
    crate::functionals::DEFAULT_QUANTILES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub regime: Regime,
    /// Datum spec, e.g. `family=polyexp rate=2 curvature=2` or `csv=path`.
    pub initial: String,
    pub mass: f64,
    pub x_max: f64,
    pub cells: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_min: Option<f64>,
    #[serde(default = "default_threshold")]
    pub trace_blowup_threshold: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_every: Option<f64>,
    /// Checks to evaluate; empty means every check that applies to the regime.
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    /// Second datum of the same mass for the comparison principle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub picard_iterations: usize,
    #[serde(default = "default_quantiles")]
    pub quantiles: usize,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        // datum CSV paths are relative to the config file
        if let Some(dir) = path.parent() {
            cfg.initial = InitialDatum::rebase_spec(&cfg.initial, dir);
            cfg.partner = cfg.partner.map(|p| InitialDatum::rebase_spec(&p, dir));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::config(format!("mass must be positive, got {}", self.mass)));
        }
        let implied = Regime::of_mass(self.mass);
        if implied != self.regime {
            return Err(Error::config(format!(
                "regime {} does not match mass {} (which is {})",
                self.regime.name(),
                self.mass,
                implied.name()
            )));
        }
        Grid::new(self.x_max, self.cells)?;
        if self.cells < 4 {
            return Err(Error::config("at least 4 cells are needed"));
        }
        if self.output_times.is_some() && self.output_every.is_some() {
            return Err(Error::config("give output_times or output_every, not both"));
        }
        if let Some(every) = self.output_every {
            if !(every > 0.0) {
                return Err(Error::config("output_every must be positive"));
            }
        }
        if self.quantiles == 0 {
            return Err(Error::config("quantiles must be positive"));
        }
        self.solver_config()?.validate()?;
        crate::solver::checked_output_times(&self.resolved_output_times(), self.t_end)?;
        InitialDatum::parse(&self.initial)?;
        if let Some(p) = &self.partner {
            InitialDatum::parse(p)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.x_max, self.cells)
    }

    /// Explicit `dt_min`, else the step at which the cell Péclet number
    /// `trace·dx` reaches [`PECLET_LIMIT`], capped at half of `dt_max` for coarse grids.
    pub fn dt_min(&self) -> f64 {
        let dx = self.x_max / self.cells as f64;
        self.dt_min.unwrap_or((self.cfl * dx * dx / PECLET_LIMIT).min(0.5 * self.dt_max))
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        Ok(SolverConfig {
            cfl: self.cfl,
            dt_max: self.dt_max,
            dt_min: self.dt_min(),
            trace_blowup_threshold: self.trace_blowup_threshold,
            theta: self.theta,
            t_end: self.t_end,
            scheme: self.scheme,
            picard_iterations: self.picard_iterations,
            picard_tol: 1e-10,
        })
    }

    /// Output times; `output_every` expands to `0, Δ, 2Δ, …` plus `t_end`.
    pub fn resolved_output_times(&self) -> Vec<f64> {
        if let Some(times) = &self.output_times {
            return times.clone();
        }
        let every = self.output_every.unwrap_or(self.t_end.max(f64::MIN_POSITIVE) / 100.0);
        let count = (self.t_end / every + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|k| k as f64 * every).filter(|t| *t <= self.t_end).collect();
        if times.last().map(|t| (self.t_end - t).abs() > 1e-9 * every).unwrap_or(true) {
            times.push(self.t_end);
        }
        times
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.regime.name().to_string())
    }

    /// Overrides from the command line.
    pub fn with_overrides(mut self, cells: Option<usize>, t_end: Option<f64>) -> Result<Self> {
        if let Some(c) = cells {
            self.cells = c;
        }
        if let Some(t) = t_end {
            self.t_end = t;
            if let Some(times) = &mut self.output_times {
                times.retain(|x| *x <= t);
            }
        }
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
regime = "critical"
initial = "family=exponential rate=1"
mass = 1.0
x_max = 20.0
cells = 400
t_end = 5.0
output_every = 0.5
"#;

    #[test]
    fn parses_and_expands_outputs() {
        let cfg = ScenarioConfig::from_toml_str(BASE).unwrap();
        let times = cfg.resolved_output_times();
        assert_eq!(times.len(), 11);
        assert!((times[10] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn regime_must_match_mass() {
        let bad = BASE.replace("mass = 1.0", "mass = 0.5");
        assert!(matches!(ScenarioConfig::from_toml_str(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{BASE}\ncell = 3\n");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ScenarioConfig::from_toml_str(BASE).unwrap();
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
