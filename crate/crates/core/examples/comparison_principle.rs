//! Ordered cumulatives stay ordered along the flow.

use halfline_drift::integrated::{cumulate, order_check, run_integrated};
use halfline_drift::profiles::ExponentialProfile;
use halfline_drift::solver::SolverConfig;
use halfline_drift::{DensityField, Grid};

fn main() -> halfline_drift::Result<()> {
    let grid = Grid::new(20.0, 400)?;
    let lower = cumulate(&DensityField::from_profile(grid, &ExponentialProfile::new(1.0)?)?);
    let upper = cumulate(&DensityField::from_profile(grid, &ExponentialProfile::new(2.0)?)?);
    let cfg = SolverConfig { t_end: 3.0, dt_max: 0.01, dt_min: 1e-6, ..SolverConfig::default() };
    let times: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    let a = run_integrated(&upper, &cfg, &times)?;
    let b = run_integrated(&lower, &cfg, &times)?;
    let slack = 10.0 * (grid.dx().powi(2) + cfg.dt_max);
    println!("{:>5} {:>14} {:>8}", "t", "max violation", "ordered");
    for (u, l) in a.snapshots.iter().zip(&b.snapshots) {
        let v = order_check(u, l, slack)?;
        println!("{:>5.1} {:>14.3e} {:>8}", u.time(), v.max_violation, v.holds);
    }
    Ok(())
}
