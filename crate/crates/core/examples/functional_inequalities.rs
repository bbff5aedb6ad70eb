//! Entropy, Fisher information and Wasserstein distance with the
//! inequalities linking them.

use halfline_drift::functionals::{
    csiszar_kullback_check, fisher_information, hwi_check, log_sobolev_check, moment, relative_entropy, wasserstein2,
    Measure, DEFAULT_QUANTILES,
};
use halfline_drift::profiles::{ExponentialProfile, GaussianTailProfile, Profile};
use halfline_drift::solver::boundary_trace;
use halfline_drift::{DensityField, Grid};

fn main() -> halfline_drift::Result<()> {
    let grid = Grid::new(40.0, 8000)?;
    let nu1 = ExponentialProfile::new(1.0)?;
    let nu2 = ExponentialProfile::new(2.0)?;
    let f1 = DensityField::from_profile(grid, &nu1)?;
    let f2 = DensityField::from_profile(grid, &nu2)?;
    println!("H(ν₂|ν₁)   = {:.8} (log 2 − 1/2 = {:.8})", relative_entropy(&f2, &nu1)?, 2f64.ln() - 0.5);
    println!("I(ν₂|ν₁)   = {:.8}", fisher_information(&f2, &f1)?);
    let w = wasserstein2(&Measure::Field(&f2), &Measure::Field(&f1), DEFAULT_QUANTILES)?;
    println!("W₂(ν₂,ν₁)² = {:.8}", w * w);

    let bumpy = |x: f64| 1.0 + 0.3 * (2.0 * x).sin() * (-0.5 * x).exp();
    let f = DensityField::from_fn(grid, |x| nu1.density(x) * bumpy(x))?.normalized_to(1.0)?;
    println!("\nCsiszár–Kullback residual: {:.4e}", csiszar_kullback_check(&f, &nu1)?);

    let g = GaussianTailProfile::steady_state(0.5)?;
    let ug = DensityField::from_profile(grid, &g)?;
    let u = DensityField::from_fn(grid, |y| g.density(y) * bumpy(y))?.normalized_to(ug.mass())?;
    println!("log-Sobolev residual:      {:.4e}", log_sobolev_check(&u, g.potential(), 1.0)?);

    let b = boundary_trace(&f)?;
    let alpha = 1.0 / moment(&f, 1)?;
    let r = hwi_check(&f, &ExponentialProfile::new(b)?, &ExponentialProfile::new(alpha)?, DEFAULT_QUANTILES)?;
    println!("HWI residual:              {:.4e}", r.hwi);
    println!("entropy gap:               {:.4e}", r.entropy_gap);
    println!("transport gap:             {:.4e}", r.transport_gap);
    Ok(())
}
