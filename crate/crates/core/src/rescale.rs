//! Self-similar variables `τ = log(1+2t)`, `y = x/√(1+2t)`,
//! `u(τ,y) = √(1+2t)·n(t, √(1+2t)·y)`.
//!
//! The default map rescales the grid itself, so it is exact and
//! mass-preserving; [`resample_selfsimilar`] interpolates onto a given grid.

use crate::error::{Error, Result};
use crate::grid::{DensityField, Grid};
use crate::profiles::{GaussianTailProfile, Profile};

/// A density in self-similar variables. `field.time()` holds `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledField {
    pub field: DensityField,
    pub tau: f64,
    /// Physical time of the originating snapshot.
    pub t: f64,
}

pub fn dilation(t: f64) -> f64 {
    (1.0 + 2.0 * t).sqrt()
}

pub fn tau_of(t: f64) -> f64 {
    (2.0 * t).ln_1p()
}

pub fn t_of(tau: f64) -> f64 {
    0.5 * tau.exp_m1()
}

/// Exact change of variables: the `y` grid is the `x` grid shrunk by `√(1+2t)`.
pub fn to_selfsimilar(field: &DensityField) -> Result<RescaledField> {
    let t = field.time();
    let s = dilation(t);
    let grid = field.grid().scaled(1.0 / s)?;
    let tau = tau_of(t);
    let values = field.values().iter().map(|v| v * s).collect();
    Ok(RescaledField {
        field: DensityField::new(grid, values, tau)?,
        tau,
        t,
    })
}

/// Inverse of [`to_selfsimilar`].
pub fn from_selfsimilar(r: &RescaledField) -> Result<DensityField> {
    if !(r.tau >= 0.0) {
        return Err(Error::domain(format!("tau must be nonnegative, got {}", r.tau)));
    }
    let s = dilation(r.t);
    let grid = r.field.grid().scaled(s)?;
    let values = r.field.values().iter().map(|v| v / s).collect();
    DensityField::new(grid, values, r.t)
}

/// `u(y) = s·n(s·y)` sampled at the centres of `y_grid` by linear
/// interpolation of the cell averages.
pub fn resample_selfsimilar(field: &DensityField, y_grid: &Grid) -> Result<RescaledField> {
    let t = field.time();
    let s = dilation(t);
    let tau = tau_of(t);
    let values = y_grid.centers().map(|y| s * field.interpolate(s * y)).collect();
    Ok(RescaledField {
        field: DensityField::new(*y_grid, values, tau)?,
        tau,
        t,
    })
}

/// `‖n(t) − (1/s)·G_α(·/s)‖₁` on the field's grid; `alpha` must solve the
/// mass equation for `M`.
pub fn rescaled_l1_distance(field: &DensityField, alpha: f64, mass: f64) -> Result<f64> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::domain(format!("self-similar profile needs 0 < M < 1, got {mass}")));
    }
    let g = steady_profile(alpha, mass);
    let profile = g.at_time(field.time());
    let grid = field.grid();
    let dx = grid.dx();
    Ok(dx
        * field
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| (v - profile.cell_average(i as f64 * dx, (i + 1) as f64 * dx)).abs())
            .sum::<f64>())
}

fn steady_profile(alpha: f64, mass: f64) -> GaussianTailProfile {
    GaussianTailProfile::from_parts(alpha, alpha, mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_time_zero() {
        let g = Grid::new(10.0, 100).unwrap();
        let f = DensityField::from_fn(g, |x| (-x).exp()).unwrap();
        let r = to_selfsimilar(&f).unwrap();
        assert_eq!(r.tau, 0.0);
        assert_eq!(r.field.values(), f.values());
    }

    #[test]
    fn round_trip_and_mass() {
        let g = Grid::new(10.0, 100).unwrap();
        let f = DensityField::from_fn(g, |x| x * (-x).exp()).unwrap().with_time(3.7);
        let r = to_selfsimilar(&f).unwrap();
        assert!((r.field.mass() - f.mass()).abs() <= 1e-14 * f.mass());
        let back = from_selfsimilar(&r).unwrap();
        assert_eq!(back.time(), 3.7);
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn profile_maps_to_itself() {
        let prof = GaussianTailProfile::steady_state(0.5).unwrap();
        let t = 2.0;
        let g = Grid::new(30.0, 3000).unwrap();
        let f = DensityField::from_profile(g, &prof.at_time(t)).unwrap().with_time(t);
        let r = to_selfsimilar(&f).unwrap();
        let direct = DensityField::from_profile(*r.field.grid(), &prof).unwrap();
        assert!(r.field.sup_distance(&direct.with_time(r.tau)).unwrap() < 1e-12);
        assert!(rescaled_l1_distance(&f, prof.beta(), 0.5).unwrap() < 1e-12);
    }
}
