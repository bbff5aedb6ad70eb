//! At critical mass every exponential `α·e^{−αx}` is a steady state.

use halfline_drift::profiles::ExponentialProfile;
use halfline_drift::solver::{run, SolverConfig};
use halfline_drift::{DensityField, Grid};

fn main() -> halfline_drift::Result<()> {
    let grid = Grid::new(20.0, 400)?;
    let n0 = DensityField::from_profile(grid, &ExponentialProfile::new(1.0)?)?;
    let cfg = SolverConfig { t_end: 5.0, dt_max: 0.01, dt_min: 1e-6, ..SolverConfig::default() };
    let times: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
    let traj = run(&n0, &cfg, &times)?;
    println!("{:>5} {:>12} {:>12}", "t", "sup drift", "mass");
    for s in &traj.snapshots {
        println!("{:>5.1} {:>12.3e} {:>12.10}", s.time(), s.sup_distance(&n0)?, s.mass());
    }
    let worst = traj.series.samples.iter().map(|s| (s.trace - 1.0).abs()).fold(0.0, f64::max);
    println!("max |trace − 1| = {worst:.3e} over {} steps", traj.series.samples.len());
    Ok(())
}
