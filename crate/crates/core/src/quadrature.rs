//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre cell rules.
//!
//! The adaptive rule is the 7/15-point Gauss–Kronrod pair with global
//! interval bisection: the interval with the largest error estimate is split
//! until the summed estimate drops below the absolute tolerance.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default absolute tolerance for profile integrals.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(PartialEq)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if b < a {
        let est = integrate(f, b, a, tol)?;
        return Ok(Estimate {
            value: -est.value,
            error: est.error,
        });
    }
    let (value, error) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut total_err = error;
    while total_err > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                tol,
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            return Err(Error::Quadrature {
                tol,
                estimate: total_err,
            });
        }
        let (v1, e1) = kronrod(&f, worst.a, mid);
        let (v2, e2) = kronrod(&f, mid, worst.b);
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // resum to shed the drift of the running error
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

/// Smallest `b = a + h·2^k` such that `|f(b)| < threshold`, assuming `f`
/// eventually decays monotonically.
pub fn decay_cutoff<F: Fn(f64) -> f64>(f: F, a: f64, initial_step: f64, threshold: f64) -> f64 {
    let mut step = initial_step.max(f64::MIN_POSITIVE);
    let mut b = a + step;
    for _ in 0..200 {
        if f(b).abs() < threshold {
            return b;
        }
        step *= 2.0;
        b = a + step;
    }
    b
}

/// Integrates a decaying integrand over `[a, ∞)` by truncating where it
/// falls below `1e-16`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> Result<Estimate> {
    let b = decay_cutoff(&f, a, scale, 1e-16);
    integrate(f, a, b, tol)
}

const GL3_NODE: f64 = 0.774_596_669_241_483_4;

/// Three-point Gauss–Legendre mean of `f` over `[a, b]`, exact for quintics.
pub fn gauss_legendre_mean<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (5.0 * f(c - GL3_NODE * h) + 8.0 * f(c) + 5.0 * f(c + GL3_NODE * h)) / 18.0
}

/// Logarithm of [`gauss_legendre_mean`] from the log of the integrand,
/// stable when the integrand underflows.
pub fn gauss_legendre_log_mean<F: Fn(f64) -> f64>(log_f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let l = [log_f(c - GL3_NODE * h), log_f(c), log_f(c + GL3_NODE * h)];
    let w = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let top = l.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + l.iter().zip(w).map(|(li, wi)| wi * (li - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((est.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_half_line() {
        let est = integrate_to_infinity(|y: f64| (-0.5 * y * y).exp(), 0.0, 1.0, 1e-13).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((est.value - exact).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let fwd = integrate(f64::sin, 0.0, 1.0, 1e-13).unwrap().value;
        let back = integrate(f64::sin, 1.0, 0.0, 1e-13).unwrap().value;
        assert_eq!(fwd, -back);
    }

    #[test]
    fn sharp_exponential() {
        let est = integrate(|x: f64| 1e3 * (-1e3 * x).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((est.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn log_mean_matches_mean() {
        let f = |x: f64| (-x * x).exp();
        let direct = gauss_legendre_mean(f, 0.2, 0.9).ln();
        let logged = gauss_legendre_log_mean(|x| -x * x, 0.2, 0.9);
        assert!((direct - logged).abs() < 1e-14);
        assert!(gauss_legendre_log_mean(|x| -x * x, 40.0, 41.0).is_finite());
    }

    #[test]
    fn gl3_mean_exact_for_quintic() {
        let m = gauss_legendre_mean(|x| x.powi(5), 1.0, 3.0);
        assert!((m - (729.0 - 1.0) / 6.0 / 2.0).abs() < 1e-12);
    }
}
