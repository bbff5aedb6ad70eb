//! Closed-form densities and the analytic bounds built from them.
//!
//! Everything here is a pure function of its inputs. Integrals without a
//! closed form go through [`crate::quadrature`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_log_mean, gauss_legendre_mean, integrate, integrate_to_infinity, DEFAULT_TOL};

/// A density on the half-line that can be discretized on a grid.
pub trait Profile: Sync {
    fn density(&self, x: f64) -> f64;

    /// Total mass on `[0, ∞)`.
    fn mass(&self) -> f64;

    /// Mean of the density over `[a, b]`.
    fn cell_average(&self, a: f64, b: f64) -> f64 {
        gauss_legendre_mean(|x| self.density(x), a, b)
    }

    fn log_density(&self, x: f64) -> f64 {
        self.density(x).ln()
    }

    /// Logarithm of [`Profile::cell_average`], finite where the average underflows.
    fn log_cell_average(&self, a: f64, b: f64) -> f64 {
        let avg = self.cell_average(a, b);
        if avg > 1e-250 {
            avg.ln()
        } else {
            gauss_legendre_log_mean(|x| self.log_density(x), a, b)
        }
    }
}

/// `mass · rate · exp(−rate·x)`; unit mass unless built with [`ExponentialProfile::with_mass`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialProfile {
    rate: f64,
    mass: f64,
}

impl ExponentialProfile {
    pub fn new(rate: f64) -> Result<Self> {
        Self::with_mass(rate, 1.0)
    }

    pub fn with_mass(rate: f64, mass: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain(format!("exponential rate must be positive, got {rate}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        Ok(ExponentialProfile { rate, mass })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `∫ x^k ν` for the unit-mass profile: `k!/rate^k`.
    pub fn moment(&self, k: u32) -> f64 {
        let fact: f64 = (1..=k).map(f64::from).product();
        self.mass * fact / self.rate.powi(k as i32)
    }

    pub fn cumulative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -self.mass * (-self.rate * x).exp_m1()
        }
    }

    /// Inverse of the normalized cumulative: `−ln(1 − q)/rate`.
    pub fn quantile(&self, q: f64) -> f64 {
        -(-q).ln_1p() / self.rate
    }
}

impl Profile for ExponentialProfile {
    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.mass * self.rate * (-self.rate * x).exp()
        }
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn log_density(&self, x: f64) -> f64 {
        (self.mass * self.rate).ln() - self.rate * x
    }

    fn cell_average(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return self.density(a);
        }
        // e^{−ra} − e^{−rb} = e^{−ra}·(−expm1(−r(b−a)))
        let r = self.rate;
        self.mass * (-r * a).exp() * -(-r * (b - a)).exp_m1() / (b - a)
    }
}

/// `∫₀^∞ exp(−β·y − y²/2) dy` by adaptive quadrature.
pub fn gaussian_tail_integral(beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::domain(format!("beta must be finite, got {beta}")));
    }
    if beta > 1.0 {
        // substitute u = β·y so the integrand decays on a unit scale
        let est = integrate_to_infinity(|u| (-u - 0.5 * (u / beta).powi(2)).exp(), 0.0, 1.0, DEFAULT_TOL)?;
        Ok(est.value / beta)
    } else {
        let start = (-beta).max(0.0);
        let head = integrate(|y| (-beta * y - 0.5 * y * y).exp(), 0.0, start, DEFAULT_TOL * (1.0 + (beta * beta / 2.0).exp()))?;
        let tail = integrate_to_infinity(|y| (-beta * y - 0.5 * y * y).exp(), start, 1.0, DEFAULT_TOL)?;
        Ok(head.value + tail.value)
    }
}

/// Mass of `G_α(y) = α·exp(−α·y − y²/2)`.
pub fn selfsimilar_mass(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    // α∫e^{−αy−y²/2}dy = ∫e^{−u−u²/(2α²)}du
    if alpha >= 1.0 {
        let a2 = alpha * alpha;
        Ok(integrate_to_infinity(|u| (-u - 0.5 * u * u / a2).exp(), 0.0, 1.0, DEFAULT_TOL)?.value)
    } else {
        Ok(alpha * gaussian_tail_integral(alpha)?)
    }
}

/// `prefactor · exp(−beta·y − y²/2)` with the prefactor fixed by the mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTailProfile {
    beta: f64,
    prefactor: f64,
    mass: f64,
}

impl GaussianTailProfile {
    pub fn new(beta: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass <= 1.0) {
            return Err(Error::domain(format!("Gaussian-tail mass must lie in (0, 1], got {mass}")));
        }
        let prefactor = mass / gaussian_tail_integral(beta)?;
        Ok(GaussianTailProfile { beta, prefactor, mass })
    }

    /// The rescaled steady state `G_α` for mass `M < 1`, where the
    /// prefactor and the linear coefficient coincide.
    pub fn steady_state(mass: f64) -> Result<Self> {
        let alpha = solve_subcritical_alpha(mass, 1e-13)?;
        Ok(GaussianTailProfile {
            beta: alpha,
            prefactor: alpha,
            mass,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// `∫ y G = prefactor·(1 − β·∫e^{−βy−y²/2}) = prefactor − β·mass`.
    pub fn first_moment(&self) -> f64 {
        self.prefactor - self.beta * self.mass
    }

    /// Time-dependent profile `(1/s)·G(x/s)` with `s = √(1+2t)`.
    pub fn at_time(&self, t: f64) -> ScaledProfile<'_, Self> {
        ScaledProfile {
            inner: self,
            scale: (1.0 + 2.0 * t).sqrt(),
        }
    }
}

impl Profile for GaussianTailProfile {
    fn density(&self, y: f64) -> f64 {
        if y < 0.0 {
            0.0
        } else {
            self.prefactor * (-self.beta * y - 0.5 * y * y).exp()
        }
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn log_density(&self, y: f64) -> f64 {
        self.prefactor.ln() - self.beta * y - 0.5 * y * y
    }
}

impl GaussianTailProfile {
    /// Profile with an explicit prefactor; no check that it carries `mass`.
    pub fn from_parts(beta: f64, prefactor: f64, mass: f64) -> Self {
        GaussianTailProfile { beta, prefactor, mass }
    }

    /// Potential `V` with `e^{−V}` equal to the profile; `V″ = 1`.
    pub fn potential(&self) -> impl Fn(f64) -> f64 + '_ {
        move |y| -self.log_density(y)
    }
}

/// `x ↦ inner(x/scale)/scale`, a mass-preserving dilation.
#[derive(Debug, Clone, Copy)]
pub struct ScaledProfile<'a, P> {
    inner: &'a P,
    scale: f64,
}

impl<P: Profile> Profile for ScaledProfile<'_, P> {
    fn density(&self, x: f64) -> f64 {
        self.inner.density(x / self.scale) / self.scale
    }

    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    fn cell_average(&self, a: f64, b: f64) -> f64 {
        self.inner.cell_average(a / self.scale, b / self.scale) / self.scale
    }

    fn log_density(&self, x: f64) -> f64 {
        self.inner.log_density(x / self.scale) - self.scale.ln()
    }

    fn log_cell_average(&self, a: f64, b: f64) -> f64 {
        self.inner.log_cell_average(a / self.scale, b / self.scale) - self.scale.ln()
    }
}

/// Root of `α ↦ α·∫e^{−αy−y²/2}dy = M` by bisection on `[1e-8, 1e8]`.
pub fn solve_subcritical_alpha(mass: f64, tol: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    if mass >= 1.0 {
        return Err(Error::NoSolution(format!(
            "the self-similar mass is below 1 for every alpha, no profile carries mass {mass}"
        )));
    }
    let (mut lo, mut hi) = (1e-8_f64, 1e8_f64);
    let residual = |a: f64| selfsimilar_mass(a).map(|m| m - mass);
    if residual(lo)? > 0.0 {
        return Err(Error::NoSolution(format!("mass {mass} is below the bracket")));
    }
    if residual(hi)? < 0.0 {
        return Err(Error::NoSolution(format!("mass {mass} is above the bracket")));
    }
    for _ in 0..400 {
        // geometric midpoint: the bracket spans sixteen decades
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let r = residual(mid)?;
        if r.abs() <= tol {
            return Ok(mid);
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let r = residual(mid)?;
    if r.abs() <= tol {
        Ok(mid)
    } else {
        Err(Error::NoSolution(format!("bisection stalled with residual {r:e} above {tol:e}")))
    }
}

/// Steady-state rate at critical mass: `1/J0`.
pub fn critical_alpha(j0: f64) -> Result<f64> {
    if !(j0 > 0.0 && j0.is_finite()) {
        return Err(Error::domain(format!("first moment must be positive, got {j0}")));
    }
    Ok(1.0 / j0)
}

/// Supersolution `f(x/√(1−2λt))` with `f(x) = μ∫₀ˣ exp(λy²/2 − μy)dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilarSupersolution {
    lambda: f64,
    mu: f64,
}

impl SelfSimilarSupersolution {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::domain("lambda must be finite"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!("mu must be positive, got {mu}")));
        }
        Ok(SelfSimilarSupersolution { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn horizon(&self) -> f64 {
        if self.lambda > 0.0 {
            0.5 / self.lambda
        } else {
            f64::INFINITY
        }
    }

    fn dilation(&self, t: f64) -> Result<f64> {
        let d = 1.0 - 2.0 * self.lambda * t;
        if t >= self.horizon() || d <= 0.0 {
            return Err(Error::Horizon {
                t,
                horizon: self.horizon(),
            });
        }
        Ok(d.sqrt())
    }

    fn integrand(&self, y: f64) -> f64 {
        self.mu * (0.5 * self.lambda * y * y - self.mu * y).exp()
    }

    /// `∫_a^b f′`, closed form when `λ = 0`.
    fn profile_increment(&self, a: f64, b: f64) -> Result<f64> {
        if self.lambda == 0.0 {
            return Ok((-self.mu * a).exp() - (-self.mu * b).exp());
        }
        let scale = self.integrand(a).max(self.integrand(b)).max(1.0);
        Ok(integrate(|y| self.integrand(y), a, b, DEFAULT_TOL * scale)?.value)
    }

    /// The profile `f(x)`.
    pub fn profile(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain("the supersolution lives on x ≥ 0"));
        }
        self.profile_increment(0.0, x)
    }

    /// `f` at nondecreasing sample points, accumulated piece by piece.
    pub fn profile_at(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &x in xs {
            if x < prev {
                return Err(Error::domain("sample points must be nonnegative and nondecreasing"));
            }
            acc += self.profile_increment(prev, x)?;
            out.push(acc);
            prev = x;
        }
        Ok(out)
    }

    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        let s = self.dilation(t)?;
        self.profile(x / s)
    }

    /// `μ/√(1−2λt)`, the induced bound on the trace.
    pub fn trace_bound(&self, t: f64) -> Result<f64> {
        Ok(self.mu / self.dilation(t)?)
    }
}

/// First `(λ, μ)` in ascending-λ, then ascending-μ order whose profile
/// dominates the samples `(x, N0(x))`. `None` when the grid has no such pair.
pub fn find_dominating_supersolution(
    samples: &[(f64, f64)],
    lambda_grid: &[f64],
    mu_grid: &[f64],
) -> Result<Option<SelfSimilarSupersolution>> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.iter().any(|(x, _)| *x < 0.0) {
        return Err(Error::domain("cumulative samples must sit at x ≥ 0"));
    }
    let xs: Vec<f64> = sorted.iter().map(|s| s.0).collect();
    let mut lambdas = lambda_grid.to_vec();
    lambdas.sort_by(f64::total_cmp);
    let mut mus = mu_grid.to_vec();
    mus.sort_by(f64::total_cmp);
    for &lambda in &lambdas {
        for &mu in &mus {
            let candidate = SelfSimilarSupersolution::new(lambda, mu)?;
            let f = candidate.profile_at(&xs)?;
            if f.iter().zip(&sorted).all(|(fv, (_, n))| *fv >= *n) {
                return Ok(Some(candidate));
            }
        }
    }
    Ok(None)
}

/// `max(0, M − J/x)`: lower bound on the cumulative at `x`.
pub fn chebyshev_lower_bound(mass: f64, first_moment: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("Chebyshev bound needs x > 0, got {x}")));
    }
    if !(mass > 0.0) || first_moment < 0.0 {
        return Err(Error::domain("Chebyshev bound needs M > 0 and J ≥ 0"));
    }
    Ok((mass - first_moment / x).max(0.0))
}

pub const DEFAULT_FOURIER_TERMS: usize = 64;

/// Heat-equation subsolution on `[0, L]` pinned at `B = M − J0/L` on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSubsolution {
    length: f64,
    boundary_value: f64,
    coefficients: Vec<f64>,
}

/// Value of the trace lower bound with its truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBound {
    pub value: f64,
    /// Bound on the neglected tail of the series.
    pub remainder: f64,
    /// True at `t = 0`, where the alternating series is summed in the Cesàro sense.
    pub cesaro: bool,
}

fn boundary_value(mass: f64, j0: f64, length: f64, n_max: usize) -> Result<f64> {
    if !(length > 0.0 && mass > 0.0 && j0 >= 0.0) {
        return Err(Error::domain("subsolution needs L > 0, M > 0, J0 ≥ 0"));
    }
    if length < j0 / mass {
        return Err(Error::domain(format!(
            "L = {length} is below J0/M = {}, the right boundary value would be negative",
            j0 / mass
        )));
    }
    if n_max == 0 {
        return Err(Error::domain("at least one Fourier mode is needed"));
    }
    Ok(mass - j0 / length)
}

impl FourierSubsolution {
    /// Coefficients `g_n = (2/L)∫₀^L (N0(y) − yB/L) sin(nπy/L) dy` by quadrature.
    pub fn build<F: Fn(f64) -> f64>(n0: F, mass: f64, j0: f64, length: f64, n_max: usize) -> Result<Self> {
        let b = boundary_value(mass, j0, length, n_max)?;
        let coefficients = (1..=n_max)
            .map(|n| {
                let k = n as f64 * PI / length;
                integrate(|y| (n0(y) - y * b / length) * (k * y).sin(), 0.0, length, 1e-13)
                    .map(|e| 2.0 * e.value / length)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FourierSubsolution {
            length,
            boundary_value: b,
            coefficients,
        })
    }

    /// Same coefficients for a piecewise-linear `N0` through `(x, N)` nodes,
    /// integrated exactly. Nodes beyond `L` are ignored; the last node must reach `L`.
    pub fn from_samples(samples: &[(f64, f64)], mass: f64, j0: f64, length: f64, n_max: usize) -> Result<Self> {
        let b = boundary_value(mass, j0, length, n_max)?;
        if samples.len() < 2 || samples[0].0 > 0.0 || samples.last().map(|s| s.0 < length).unwrap_or(true) {
            return Err(Error::domain("samples must cover [0, L]"));
        }
        let mut coefficients = vec![0.0; n_max];
        for w in samples.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x1 <= x0 {
                if x1 < x0 {
                    return Err(Error::domain("sample abscissae must be nondecreasing"));
                }
                continue;
            }
            if x0 >= length {
                break;
            }
            let slope = (y1 - y0) / (x1 - x0);
            let hi = x1.min(length);
            // integrand (p + q·y)·sin(k·y) on [x0, hi] after removing yB/L
            let q = slope - b / length;
            let p = y0 - slope * x0;
            for (idx, g) in coefficients.iter_mut().enumerate() {
                let k = (idx + 1) as f64 * PI / length;
                let anti = |y: f64| -p * (k * y).cos() / k + q * ((k * y).sin() / (k * k) - y * (k * y).cos() / k);
                *g += 2.0 / length * (anti(hi) - anti(x0));
            }
        }
        Ok(FourierSubsolution {
            length,
            boundary_value: b,
            coefficients,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn boundary_value(&self) -> f64 {
        self.boundary_value
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len()
    }

    fn decay(&self, n: usize, t: f64) -> f64 {
        let k = n as f64 * PI / self.length;
        (-k * k * t).exp()
    }

    /// `Ñ(t, x)` for `x ∈ [0, L]`, extended by `B` beyond `L`.
    pub fn value(&self, t: f64, x: f64) -> f64 {
        if x >= self.length {
            return self.boundary_value;
        }
        let mut v = x * self.boundary_value / self.length;
        for (i, g) in self.coefficients.iter().enumerate() {
            let n = i + 1;
            v += g * (n as f64 * PI * x / self.length).sin() * self.decay(n, t);
        }
        v
    }

    /// `∂ₓÑ(t, 0)` including the data-dependent coefficients.
    pub fn slope_at_origin(&self, t: f64) -> f64 {
        let mut v = self.boundary_value / self.length;
        for (i, g) in self.coefficients.iter().enumerate() {
            let n = i + 1;
            v += g * n as f64 * PI / self.length * self.decay(n, t);
        }
        v
    }

    /// Coarse closed form `k(t) = (B/L)(1 − 2e^{−(π/L)²t})`.
    pub fn coarse_bound(&self, t: f64) -> f64 {
        self.boundary_value / self.length * (1.0 - 2.0 * self.decay(1, t))
    }

    /// Time after which `k(t) > 0`: `(L/π)²·log 2`.
    pub fn positivity_time(&self) -> f64 {
        (self.length / PI).powi(2) * std::f64::consts::LN_2
    }
}

/// The alternative threshold `(J0/(Mπ))²·log 2`, a factor four below
/// [`FourierSubsolution::positivity_time`] at `L = 2J0/M`.
pub fn stated_positivity_time(mass: f64, j0: f64) -> f64 {
    (j0 / (mass * PI)).powi(2) * std::f64::consts::LN_2
}

/// `(B/L)(1 + 2Σ_{n=1}^{n_max}(−1)ⁿe^{−(nπ/L)²t})`.
pub fn trace_lower_bound(sub: &FourierSubsolution, t: f64) -> TraceBound {
    let scale = sub.boundary_value / sub.length;
    let n_max = sub.n_max();
    if t <= 0.0 {
        // partial sums of Σ(−1)ⁿ alternate between −1 and 0; their mean is −1/2
        return TraceBound {
            value: 0.0,
            remainder: f64::INFINITY,
            cesaro: true,
        };
    }
    let mut sum = 0.0;
    for n in 1..=n_max {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * sub.decay(n, t);
    }
    let lead = sub.decay(n_max, t);
    let ratio = sub.decay(1, t);
    let remainder = if ratio < 1.0 { 2.0 * scale * lead / (1.0 - ratio) } else { f64::INFINITY };
    TraceBound {
        value: scale * (1.0 + 2.0 * sum),
        remainder,
        cesaro: false,
    }
}

/// Upper bound on the blow-up time and the optimal domain length:
/// `(4J0²/(M²(M−1))·(1 + (M−1)/6), 2J0/M)`.
pub fn blow_up_time_bound(mass: f64, j0: f64) -> Result<(f64, f64)> {
    if !(mass > 1.0) {
        return Err(Error::domain(format!("blow-up bound needs M > 1, got {mass}")));
    }
    if !(j0 > 0.0) {
        return Err(Error::domain(format!("first moment must be positive, got {j0}")));
    }
    let m1 = mass - 1.0;
    let t = 4.0 * j0 * j0 / (mass * mass * m1) * (1.0 + m1 / 6.0);
    Ok((t, 2.0 * j0 / mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_moments_and_mass() {
        let p = ExponentialProfile::new(2.0).unwrap();
        let m = integrate_to_infinity(|x| p.density(x), 0.0, 1.0, 1e-13).unwrap().value;
        assert!((m - 1.0).abs() < 1e-10);
        let j = integrate_to_infinity(|x| x * p.density(x), 0.0, 1.0, 1e-13).unwrap().value;
        assert!((j - 0.5).abs() < 1e-10);
        assert_relative_eq!(p.moment(2), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.cell_average(0.0, 1.0), 1.0 - (-2.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn critical_alpha_examples() {
        assert_eq!(critical_alpha(2.0).unwrap(), 0.5);
        assert_eq!(critical_alpha(1.0).unwrap(), 1.0);
        assert!(critical_alpha(0.0).is_err());
    }

    #[test]
    fn subcritical_alpha_half_mass() {
        let a = solve_subcritical_alpha(0.5, 1e-10).unwrap();
        let est = integrate_to_infinity(|y| a * (-a * y - 0.5 * y * y).exp(), 0.0, 1.0, 1e-14).unwrap();
        assert!((est.value - 0.5).abs() <= 1e-10);
        assert!(matches!(solve_subcritical_alpha(1.0, 1e-10), Err(Error::NoSolution(_))));
        assert!(matches!(solve_subcritical_alpha(0.0, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn supersolution_examples() {
        let s = SelfSimilarSupersolution::new(0.0, 1.0).unwrap();
        for &(t, x) in &[(0.0, 0.3), (7.0, 2.0)] {
            assert_relative_eq!(s.value(t, x).unwrap(), 1.0 - (-x as f64).exp(), epsilon = 1e-14);
        }
        let s = SelfSimilarSupersolution::new(1.0, 1.0).unwrap();
        assert!(s.value(0.4, 3.0).unwrap().is_finite());
        assert!(matches!(s.value(0.5, 1.0), Err(Error::Horizon { .. })));
        assert_relative_eq!(s.trace_bound(0.375).unwrap(), 2.0, epsilon = 1e-14);
        let s = SelfSimilarSupersolution::new(0.0, 3.0).unwrap();
        assert_eq!(s.trace_bound(12.0).unwrap(), 3.0);
        let s = SelfSimilarSupersolution::new(-4.0, 1.0).unwrap();
        assert_relative_eq!(s.trace_bound(1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn negative_lambda_recovers_steady_cumulative() {
        let g = GaussianTailProfile::steady_state(0.5).unwrap();
        let s = SelfSimilarSupersolution::new(-1.0, g.beta()).unwrap();
        // μ∫e^{−y²/2−μy} is the cumulative of G_α when μ = α
        let x = 1.7;
        let cum = integrate(|y| g.density(y), 0.0, x, 1e-14).unwrap().value;
        assert_relative_eq!(s.profile(x).unwrap(), cum, epsilon = 1e-11);
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_lower_bound(1.0, 1.0, 2.0).unwrap(), 0.5);
        assert_eq!(chebyshev_lower_bound(2.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(chebyshev_lower_bound(1.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(chebyshev_lower_bound(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn blow_up_examples() {
        let (t, l) = blow_up_time_bound(2.0, 1.0).unwrap();
        assert_relative_eq!(t, 7.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(l, 1.0);
        let (t, l) = blow_up_time_bound(3.0, 1.0).unwrap();
        assert_relative_eq!(t, 8.0 / 27.0, epsilon = 1e-15);
        assert_relative_eq!(l, 2.0 / 3.0, epsilon = 1e-15);
        assert!(blow_up_time_bound(1.0, 1.0).is_err());
    }

    #[test]
    fn fourier_linear_datum_has_no_modes() {
        let (m, j0, l) = (2.0, 1.0, 1.0);
        let b = m - j0 / l;
        let sub = FourierSubsolution::build(|y| y * b / l, m, j0, l, 8).unwrap();
        assert!(sub.coefficients().iter().all(|g| g.abs() < 1e-13));
        let sub = FourierSubsolution::build(|y| b * (PI * y / l).sin() + y * b / l, m, j0, l, 8).unwrap();
        assert_relative_eq!(sub.coefficients()[0], b, epsilon = 1e-12);
        assert!(sub.coefficients()[1..].iter().all(|g| g.abs() < 1e-12));
        assert!(FourierSubsolution::build(|y| y, 1.0, 1.0, 0.5, 4).is_err());
    }

    #[test]
    fn trace_bound_limits() {
        let sub = FourierSubsolution::build(|y| y, 2.0, 1.0, 1.0, 64).unwrap();
        let far = trace_lower_bound(&sub, 50.0);
        assert_relative_eq!(far.value, 1.0, epsilon = 1e-14);
        assert!(sub.coarse_bound(sub.positivity_time()).abs() < 1e-15);
        let zero = trace_lower_bound(&sub, 0.0);
        assert!(zero.cesaro && zero.value == 0.0);
    }
}
