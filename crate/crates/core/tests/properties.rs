use proptest::prelude::*;

use halfline_drift::functionals::{moment, relative_entropy, wasserstein2, Measure};
use halfline_drift::profiles::{
    blow_up_time_bound, selfsimilar_mass, solve_subcritical_alpha, trace_lower_bound, ExponentialProfile,
    FourierSubsolution, GaussianTailProfile, Profile,
};
use halfline_drift::quadrature::integrate_to_infinity;
use halfline_drift::solver::{step, Scheme, SolverConfig};
use halfline_drift::{DensityField, Grid};

/// Wavy exponential `M·r·e^{−rx}(1 + ε·sin(kx))`, positive for `|ε| < 1`.
fn wavy(cells: usize, rate: f64, eps: f64, k: f64, mass: f64) -> DensityField {
    let grid = Grid::new(40.0 / rate, cells).unwrap();
    DensityField::from_fn(grid, |x| rate * (-rate * x).exp() * (1.0 + eps * (k * x).sin()))
        .unwrap()
        .normalized_to(mass)
        .unwrap()
}

fn solver(scheme: Scheme, dt_max: f64) -> SolverConfig {
    SolverConfig { dt_max, scheme, ..SolverConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_conserves_mass_and_positivity(
        cells in 40usize..200,
        rate in 0.5f64..4.0,
        eps in -0.8f64..0.8,
        k in 0.5f64..6.0,
        mass in 0.2f64..3.0,
        dt_max in 1e-4f64..5e-2,
        upwind in any::<bool>(),
    ) {
        let field = wavy(cells, rate, eps, k, mass);
        let scheme = if upwind { Scheme::Upwind } else { Scheme::Fitted };
        let out = step(&field, &solver(scheme, dt_max)).unwrap();
        prop_assert!(((out.field.mass() - mass) / mass).abs() <= 1e-12);
        prop_assert!(out.field.values().iter().all(|v| *v >= 0.0));
        prop_assert!(out.dt > 0.0 && out.dt <= dt_max);
    }

    #[test]
    fn cauchy_schwarz_on_moments(
        cells in 40usize..400,
        rate in 0.3f64..5.0,
        eps in -0.9f64..0.9,
        k in 0.1f64..10.0,
        mass in 0.1f64..5.0,
    ) {
        let f = wavy(cells, rate, eps, k, mass);
        let (m, j, m2) = (f.mass(), moment(&f, 1).unwrap(), moment(&f, 2).unwrap());
        prop_assert!(m * m2 >= j * j * (1.0 - 1e-12));
    }

    #[test]
    fn relative_entropy_is_nonnegative_at_equal_mass(
        rate in 0.3f64..5.0,
        eps in -0.9f64..0.9,
        k in 0.1f64..10.0,
        ref_rate in 0.2f64..6.0,
    ) {
        let f = wavy(800, rate, eps, k, 1.0);
        let h = relative_entropy(&f, &ExponentialProfile::new(ref_rate).unwrap()).unwrap();
        // the reference is truncated at x_max, so its discrete mass is below 1
        prop_assert!(h >= -1e-10);
    }

    #[test]
    fn wasserstein_triangle_inequality(a in 0.2f64..5.0, b in 0.2f64..5.0, c in 0.2f64..5.0, x0 in 0.0f64..3.0) {
        let m = |r: f64| Measure::Exponential(ExponentialProfile::new(r).unwrap());
        let w = |p: &Measure, q: &Measure| wasserstein2(p, q, 20_000).unwrap();
        let dirac = Measure::Dirac(x0);
        prop_assert!(w(&m(a), &m(c)) <= w(&m(a), &m(b)) + w(&m(b), &m(c)) + 1e-9);
        prop_assert!(w(&m(a), &dirac) <= w(&m(a), &m(b)) + w(&m(b), &dirac) + 1e-9);
    }

    #[test]
    fn alpha_inverts_selfsimilar_mass(alpha in 0.05f64..20.0) {
        let mass = selfsimilar_mass(alpha).unwrap();
        prop_assert!(mass > 0.0 && mass < 1.0);
        let back = solve_subcritical_alpha(mass, 1e-13).unwrap();
        prop_assert!((back - alpha).abs() <= 1e-7 * alpha.max(1.0));
        prop_assert!(selfsimilar_mass(alpha * 1.01).unwrap() > mass);
    }

    #[test]
    fn blow_up_bound_scales_with_first_moment_squared(mass in 1.01f64..10.0, j0 in 0.01f64..10.0, s in 0.1f64..10.0) {
        let (t, l) = blow_up_time_bound(mass, j0).unwrap();
        let (ts, ls) = blow_up_time_bound(mass, s * j0).unwrap();
        prop_assert!((ts - s * s * t).abs() <= 1e-12 * ts);
        prop_assert!((ls - s * l).abs() <= 1e-12 * ls);
    }

    #[test]
    fn trace_bound_truncation_is_controlled(length in 0.5f64..3.0, t in 0.01f64..2.0, mass in 1.1f64..4.0) {
        let j0 = 0.4 * length * mass;
        let n0 = |x: f64| (-x).exp();
        let short = FourierSubsolution::build(n0, mass, j0, length, 16).unwrap();
        let long = FourierSubsolution::build(n0, mass, j0, length, 256).unwrap();
        let a = trace_lower_bound(&short, t);
        let b = trace_lower_bound(&long, t);
        let scale = short.boundary_value() / length;
        prop_assert!((a.value - b.value).abs() <= a.remainder + 1e-12 * scale);
        // the bound never exceeds twice the limiting slope B/L
        prop_assert!(b.value <= 2.0 * scale * (1.0 + 1e-12));
    }

    #[test]
    fn gaussian_tail_first_moment(beta in -2.0f64..6.0, mass in 0.05f64..1.0) {
        let g = GaussianTailProfile::new(beta, mass).unwrap();
        let j = integrate_to_infinity(|y| y * g.density(y), 0.0, 1.0, 1e-13).unwrap().value;
        prop_assert!((j - g.first_moment()).abs() <= 1e-9 * mass.max(j));
    }
}
