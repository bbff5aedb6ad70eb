//! Least-squares rate fits for decay laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `log y` against `log(1+2t)`.
    Power,
    /// `log y` against the abscissa itself.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::domain(format!("a fit needs at least 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::domain("fit abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// Fits a decay rate to the samples `(t, y)` with `t` in `window`.
/// Non-positive `y` are rejected.
pub fn fit_rate(series: &[(f64, f64)], model: RateModel, window: (f64, f64)) -> Result<LinearFit> {
    let mut points = Vec::new();
    for &(t, y) in series.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1) {
        if !(y > 0.0) {
            return Err(Error::domain(format!("cannot fit a rate through y = {y} at t = {t}")));
        }
        let x = match model {
            RateModel::Power => (1.0 + 2.0 * t).ln(),
            RateModel::Exponential => t,
        };
        points.push((x, y.ln()));
    }
    linear_fit(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_and_exponential_rates() {
        let s: Vec<(f64, f64)> = (0..50).map(|k| k as f64 * 0.5).map(|t| (t, 3.0 * (1.0 + 2.0 * t).powf(-1.5))).collect();
        let f = fit_rate(&s, RateModel::Power, (1.0, 20.0)).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12 && f.r_squared > 1.0 - 1e-12);
        let s: Vec<(f64, f64)> = (0..50).map(|k| k as f64 * 0.1).map(|t| (t, (-2.0 * t).exp())).collect();
        let f = fit_rate(&s, RateModel::Exponential, (1.0, 3.0)).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_rate(&[(1.0, 1.0)], RateModel::Power, (0.0, 2.0)).is_err());
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.0)], RateModel::Power, (0.0, 2.0)).is_err());
    }
}
