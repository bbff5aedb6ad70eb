use std::f64::consts::PI;

use approx::assert_relative_eq;
use statrs::function::erf::erfc;

use halfline_drift::integrated::cumulate;
use halfline_drift::profiles::{
    find_dominating_supersolution, gaussian_tail_integral, selfsimilar_mass, trace_lower_bound, ExponentialProfile,
    FourierSubsolution, SelfSimilarSupersolution,
};
use halfline_drift::{DensityField, Grid};

fn gaussian_tail_closed_form(beta: f64) -> f64 {
    (0.5 * beta * beta).exp() * (PI / 2.0).sqrt() * erfc(beta / 2f64.sqrt())
}

#[test]
fn gaussian_tail_integral_matches_erfc() {
    for beta in [-3.0, -1.0, -0.2, 0.0, 0.3, 1.0, 2.5, 8.0, 30.0] {
        let got = gaussian_tail_integral(beta).unwrap();
        assert_relative_eq!(got, gaussian_tail_closed_form(beta), max_relative = 1e-10);
    }
}

#[test]
fn selfsimilar_mass_matches_erfc_and_is_monotone() {
    let mut prev = 0.0;
    // the closed form overflows beyond α ≈ 25
    for k in 1..33 {
        let alpha = 0.05 * 1.2f64.powi(k);
        let m = selfsimilar_mass(alpha).unwrap();
        assert_relative_eq!(m, alpha * gaussian_tail_closed_form(alpha), max_relative = 1e-9);
        assert!(m > prev && m < 1.0);
        prev = m;
    }
}

#[test]
fn trace_lower_bound_matches_long_series() {
    // M = 2, J0 = 1, L = 1 gives B = 1
    let sub = FourierSubsolution::build(|x| 2.0 * (1.0 - (-2.0 * x).exp()), 2.0, 1.0, 1.0, 64).unwrap();
    assert_eq!(sub.boundary_value(), 1.0);
    let t = 0.5;
    let series: f64 = (1..=10_000).map(|n| (-1f64).powi(n) * (-(n as f64 * PI).powi(2) * t).exp()).sum();
    let exact = 1.0 + 2.0 * series;
    let got = trace_lower_bound(&sub, t);
    assert!((got.value - exact).abs() <= 1e-12, "{} vs {exact}", got.value);
    assert!(got.remainder <= 1e-12);
    let coarse = sub.coarse_bound(t);
    assert!(coarse <= got.value);
}

#[test]
fn positivity_time_is_where_coarse_bound_vanishes() {
    let sub = FourierSubsolution::build(|x| 1.0 - (-x).exp(), 2.0, 1.0, 1.5, 8).unwrap();
    let t = sub.positivity_time();
    assert!(sub.coarse_bound(t).abs() < 1e-14);
    assert!(sub.coarse_bound(0.99 * t) < 0.0 && sub.coarse_bound(1.01 * t) > 0.0);
}

/// Closed-form sine coefficients of `1 − e^{−y} − yB/L` on `[0, L]`.
fn exponential_coefficient(n: usize, b: f64, l: f64) -> f64 {
    let k = n as f64 * PI / l;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let s1 = (1.0 - sign) / k;
    let se = k * (1.0 - (-l).exp() * sign) / (1.0 + k * k);
    let sy = -l * sign / k;
    2.0 / l * (s1 - se - b / l * sy)
}

#[test]
fn fourier_coefficients_of_unit_exponential() {
    let (mass, j0, l) = (1.0, 1.0, 2.0);
    let b = mass - j0 / l;
    let exact: Vec<f64> = (1..=20).map(|n| exponential_coefficient(n, b, l)).collect();

    let by_quadrature = FourierSubsolution::build(|y| 1.0 - (-y).exp(), mass, j0, l, 20).unwrap();
    for (g, e) in by_quadrature.coefficients().iter().zip(&exact) {
        assert!((g - e).abs() < 1e-12, "{g} vs {e}");
    }

    let grid = Grid::new(10.0, 20_000).unwrap();
    let field = DensityField::from_profile(grid, &ExponentialProfile::new(1.0).unwrap()).unwrap();
    let samples = cumulate(&field).samples();
    let from_samples = FourierSubsolution::from_samples(&samples, mass, j0, l, 20).unwrap();
    for (g, e) in from_samples.coefficients().iter().zip(&exact) {
        assert!((g - e).abs() < 1e-6, "{g} vs {e}");
    }
}

#[test]
fn supersolution_profile_closed_form_at_zero_lambda() {
    let s = SelfSimilarSupersolution::new(0.0, 1.7).unwrap();
    for x in [0.0, 0.1, 1.0, 4.0] {
        assert_relative_eq!(s.profile(x).unwrap(), 1.0 - (-1.7 * x).exp(), max_relative = 1e-14);
    }
    // λ > 0 by quadrature against the erfc form of ∫μe^{λy²/2−μy}
    let (lambda, mu) = (-0.5, 2.0);
    let s = SelfSimilarSupersolution::new(lambda, mu).unwrap();
    let a = (-lambda).sqrt();
    let closed = |x: f64| {
        let c = mu * (PI / (2.0 * -lambda)).sqrt() * (mu * mu / (2.0 * -lambda)).exp();
        c * (erfc(mu / (a * 2f64.sqrt())) - erfc((a * a * x + mu) / (a * 2f64.sqrt())))
    };
    for x in [0.3, 1.0, 3.0] {
        assert_relative_eq!(s.profile(x).unwrap(), closed(x), max_relative = 1e-10);
    }
}

#[test]
fn dominating_supersolution_is_first_in_order() {
    let samples: Vec<(f64, f64)> = (0..=200).map(|i| {
        let x = 0.05 * i as f64;
        (x, 1.0 - (-1.5 * x).exp())
    })
    .collect();
    let lambdas = [0.0, 0.1, 0.2];
    let mus = [0.5, 1.0, 1.4, 1.6, 2.0];
    let found = find_dominating_supersolution(&samples, &lambdas, &mus).unwrap().unwrap();
    let dominates = |lambda: f64, mu: f64| {
        let s = SelfSimilarSupersolution::new(lambda, mu).unwrap();
        samples.iter().all(|(x, n)| s.profile(*x).unwrap() >= *n)
    };
    assert!(dominates(found.lambda(), found.mu()));
    for &lambda in &lambdas {
        for &mu in &mus {
            if (lambda, mu) == (found.lambda(), found.mu()) {
                return;
            }
            assert!(!dominates(lambda, mu), "({lambda}, {mu}) dominates but was skipped");
        }
    }
}

#[test]
fn no_supersolution_when_grid_is_too_small() {
    let samples = vec![(0.0, 0.0), (1.0, 0.99)];
    assert!(find_dominating_supersolution(&samples, &[0.0], &[0.5]).unwrap().is_none());
}
