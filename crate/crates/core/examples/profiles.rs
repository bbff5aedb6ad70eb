//! Closed-form profiles: self-similar rates, blow-up bounds, supersolutions.

use halfline_drift::profiles::{
    blow_up_time_bound, chebyshev_lower_bound, selfsimilar_mass, solve_subcritical_alpha, GaussianTailProfile,
    SelfSimilarSupersolution,
};

fn main() -> halfline_drift::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "M", "alpha", "G mass", "first moment");
    for mass in [0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let alpha = solve_subcritical_alpha(mass, 1e-13)?;
        let g = GaussianTailProfile::steady_state(mass)?;
        println!("{mass:>6} {alpha:>12.8} {:>12.8} {:>12.8}", selfsimilar_mass(alpha)?, g.first_moment());
    }

    println!("\nblow-up time bound with J0 = 1");
    for mass in [1.1, 1.5, 2.0, 4.0] {
        let (t, l) = blow_up_time_bound(mass, 1.0)?;
        println!("  M = {mass}: T ≤ {t:.6} (optimal L = {l:.4})");
    }

    let s = SelfSimilarSupersolution::new(0.2, 1.5)?;
    println!("\nsupersolution λ = 0.2, μ = 1.5, horizon {}", s.horizon());
    for x in [0.5, 1.0, 2.0, 4.0] {
        println!(
            "  f({x}) = {:.6}, Chebyshev floor for M = 1, J = 1: {:.6}",
            s.profile(x)?,
            chebyshev_lower_bound(1.0, 1.0, x)?
        );
    }
    println!("  trace bound at t = 1: {:.6}", s.trace_bound(1.0)?);
    Ok(())
}
