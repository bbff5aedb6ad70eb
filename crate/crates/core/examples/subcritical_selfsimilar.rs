//! Subcritical mass: convergence to the Gaussian-tail profile in
//! self-similar variables.

use halfline_drift::functionals::lyapunov_subcritical;
use halfline_drift::profiles::{solve_subcritical_alpha, ExponentialProfile};
use halfline_drift::rescale::{rescaled_l1_distance, tau_of, to_selfsimilar};
use halfline_drift::solver::{run, SolverConfig};
use halfline_drift::{DensityField, Grid};

fn main() -> halfline_drift::Result<()> {
    let mass = 0.5;
    let alpha = solve_subcritical_alpha(mass, 1e-13)?;
    let grid = Grid::new(60.0, 1200)?;
    let n0 = DensityField::from_profile(grid, &ExponentialProfile::with_mass(1.0, mass)?)?;
    let cfg = SolverConfig { t_end: 20.0, dt_max: 0.02, dt_min: 1e-6, ..SolverConfig::default() };
    let times = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let traj = run(&n0, &cfg, &times)?;
    println!("alpha = {alpha:.8}");
    println!("{:>6} {:>8} {:>12} {:>12}", "t", "tau", "L1 to G", "L(tau)");
    for s in &traj.snapshots {
        let u = to_selfsimilar(s)?;
        println!(
            "{:>6.1} {:>8.4} {:>12.4e} {:>12.4e}",
            s.time(),
            tau_of(s.time()),
            rescaled_l1_distance(s, alpha, mass)?,
            lyapunov_subcritical(&u.field, alpha, mass)?
        );
    }
    Ok(())
}
