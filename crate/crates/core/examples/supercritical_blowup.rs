//! Supercritical mass: the trace diverges before the analytic bound.

use halfline_drift::integrated::cumulate;
use halfline_drift::profiles::{blow_up_time_bound, trace_lower_bound, ExponentialProfile, FourierSubsolution};
use halfline_drift::solver::{run, RunStatus, SolverConfig};
use halfline_drift::{DensityField, Grid};

fn main() -> halfline_drift::Result<()> {
    let (mass, rate) = (2.0, 2.0);
    let j0 = mass / rate;
    let grid = Grid::new(12.5, 10_000)?;
    let n0 = DensityField::from_profile(grid, &ExponentialProfile::with_mass(rate, mass)?)?;
    let dx = grid.dx();
    let cfg = SolverConfig { t_end: 1.5, dt_max: 1e-3, dt_min: 0.5 * dx * dx, ..SolverConfig::default() };
    let traj = run(&n0, &cfg, &[0.0])?;

    let (bound, length) = blow_up_time_bound(mass, j0)?;
    let sub = FourierSubsolution::from_samples(&cumulate(&n0).samples(), mass, j0, length, 64)?;
    match traj.status() {
        RunStatus::BlewUp { t_detect } => println!("blew up at t = {t_detect:.5}, bound {bound:.5}"),
        other => println!("no blow-up detected: {other:?}"),
    }
    println!("∫ trace dt up to detection: {:.4} (J0/(M−1) = {})", traj.series.integrated_trace(cfg.t_end), j0 / (mass - 1.0));
    let stride = (traj.series.samples.len() / 12).max(1);
    println!("{:>10} {:>14} {:>14}", "t", "trace", "lower bound");
    for s in traj.series.samples.iter().step_by(stride) {
        println!("{:>10.5} {:>14.6} {:>14.6}", s.t, s.trace, trace_lower_bound(&sub, s.t).value);
    }
    Ok(())
}
