//! Initial-datum families, addressed by a spec string such as
//! `family=polyexp rate=2 curvature=2`, `family=bump rate=4` or `csv=data.csv`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::{DensityField, Grid};
use crate::profiles::gaussian_tail_integral;
use crate::quadrature::gauss_legendre_mean;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// `M·r·e^{−rx}`.
    Exponential { rate: f64 },
    /// `A·e^{−rx}(1 + cx + dx²)` with `c = r − A`, so that `n′(0) + n(0)² = 0`.
    PolyExp { rate: f64, curvature: f64 },
    /// `∝ e^{−βx − x²/2}`.
    GaussianTail { beta: f64 },
    /// `M·r²·x·e^{−rx}`, vanishing at the origin.
    Bump { rate: f64 },
    /// `∝ r·e^{−rx}(1 + a·sin(kx))`.
    Perturbed { rate: f64, amplitude: f64, wavenumber: f64 },
    /// Columns `x,n`, linearly interpolated and zero beyond the last sample.
    Csv { path: PathBuf },
}

fn parse_pairs(spec: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for token in spec.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::config(format!("expected key=value in datum spec, got '{token}'")))?;
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::config(format!("duplicate key '{k}' in datum spec")));
        }
    }
    Ok(map)
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn take(&mut self, key: &str) -> Result<f64> {
        let raw = self
            .0
            .remove(key)
            .ok_or_else(|| Error::config(format!("datum spec is missing '{key}'")))?;
        raw.parse::<f64>()
            .map_err(|_| Error::config(format!("'{key}' is not a number: {raw}")))
    }

    fn take_or(&mut self, key: &str, default: f64) -> Result<f64> {
        if self.0.contains_key(key) {
            self.take(key)
        } else {
            Ok(default)
        }
    }

    fn finish(self) -> Result<()> {
        match self.0.keys().next() {
            Some(k) => Err(Error::config(format!("unknown key '{k}' in datum spec"))),
            None => Ok(()),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Deserialize)]
struct CsvRow {
    x: f64,
    n: f64,
}

impl InitialDatum {
    pub fn parse(spec: &str) -> Result<Self> {
        let mut map = parse_pairs(spec)?;
        if let Some(path) = map.remove("csv") {
            if !map.is_empty() {
                return Err(Error::config("csv datum takes no other keys"));
            }
            return Ok(InitialDatum::Csv { path: PathBuf::from(path) });
        }
        let family = map
            .remove("family")
            .ok_or_else(|| Error::config(format!("datum spec needs family= or csv=: '{spec}'")))?;
        let mut p = Params(map);
        let datum = match family.as_str() {
            "exponential" => InitialDatum::Exponential { rate: positive("rate", p.take("rate")?)? },
            "polyexp" => InitialDatum::PolyExp {
                rate: positive("rate", p.take("rate")?)?,
                curvature: p.take_or("curvature", 0.0)?,
            },
            "gaussian_tail" => InitialDatum::GaussianTail { beta: p.take("beta")? },
            "bump" => InitialDatum::Bump { rate: positive("rate", p.take("rate")?)? },
            "perturbed" => {
                let amplitude = p.take("amplitude")?;
                if amplitude.abs() >= 1.0 {
                    return Err(Error::config("perturbation amplitude must lie in (-1, 1)"));
                }
                InitialDatum::Perturbed {
                    rate: positive("rate", p.take("rate")?)?,
                    amplitude,
                    wavenumber: p.take("wavenumber")?,
                }
            }
            other => return Err(Error::config(format!("unknown datum family '{other}'"))),
        };
        p.finish()?;
        Ok(datum)
    }

    /// Makes a relative `csv=` path relative to `dir`; other specs pass through.
    pub fn rebase_spec(spec: &str, dir: &Path) -> String {
        match Self::parse(spec) {
            Ok(InitialDatum::Csv { path }) if path.is_relative() => format!("csv={}", dir.join(path).display()),
            _ => spec.to_string(),
        }
    }

    /// Pointwise density with mass `mass`.
    pub fn density(&self, mass: f64) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        Ok(match *self {
            InitialDatum::Exponential { rate } => Box::new(move |x: f64| mass * rate * (-rate * x).exp()),
            InitialDatum::PolyExp { rate, curvature } => {
                let (a, c) = polyexp_coefficients(rate, curvature, mass)?;
                Box::new(move |x: f64| a * (-rate * x).exp() * (1.0 + c * x + curvature * x * x))
            }
            InitialDatum::GaussianTail { beta } => {
                let z = gaussian_tail_integral(beta)?;
                Box::new(move |x: f64| mass / z * (-beta * x - 0.5 * x * x).exp())
            }
            InitialDatum::Bump { rate } => Box::new(move |x: f64| mass * rate * rate * x * (-rate * x).exp()),
            InitialDatum::Perturbed { rate, amplitude, wavenumber } => {
                // ∫r e^{−rx} sin(kx) = r k/(r² + k²)
                let z = 1.0 + amplitude * rate * wavenumber / (rate * rate + wavenumber * wavenumber);
                Box::new(move |x: f64| mass / z * rate * (-rate * x).exp() * (1.0 + amplitude * (wavenumber * x).sin()))
            }
            InitialDatum::Csv { ref path } => {
                let samples = read_samples(path)?;
                let mass_raw = trapezoid(&samples);
                if !(mass_raw > 0.0) {
                    return Err(Error::config(format!("{}: datum has no mass", path.display())));
                }
                let k = mass / mass_raw;
                Box::new(move |x: f64| k * interpolate(&samples, x))
            }
        })
    }

    /// Cell averages on `grid`, rescaled so the discrete mass is exactly `mass`.
    pub fn field(&self, grid: Grid, mass: f64) -> Result<DensityField> {
        let f = self.density(mass)?;
        let dx = grid.dx();
        let values: Vec<f64> = (0..grid.cells())
            .map(|i| {
                let a = i as f64 * dx;
                gauss_legendre_mean(&f, a, a + dx).max(0.0)
            })
            .collect();
        DensityField::new(grid, values, 0.0)?.normalized_to(mass)
    }
}

/// `(A, c)` of the polynomial-exponential family for mass `mass`.
pub fn polyexp_coefficients(rate: f64, curvature: f64, mass: f64) -> Result<(f64, f64)> {
    let r = rate;
    let half = 1.0 / r + curvature / (r * r * r);
    let disc = half * half - mass / (r * r);
    if disc < 0.0 {
        return Err(Error::domain(format!(
            "polyexp with rate {rate}, curvature {curvature} cannot carry mass {mass}"
        )));
    }
    let a = r * r * (half - disc.sqrt());
    let c = r - a;
    // 1 + cx + dx² must stay positive on x ≥ 0
    let negative = curvature < 0.0 || (c < 0.0 && (curvature == 0.0 || c * c >= 4.0 * curvature));
    if !(a > 0.0) || negative {
        return Err(Error::domain(format!(
            "polyexp with rate {rate}, curvature {curvature}, mass {mass} is not positive"
        )));
    }
    Ok((a, c))
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    let mut samples = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(|e| Error::io(path, e))?;
        if !(row.n >= 0.0 && row.n.is_finite() && row.x >= 0.0) {
            return Err(Error::config(format!("{}: invalid sample x={} n={}", path.display(), row.x, row.n)));
        }
        samples.push((row.x, row.n));
    }
    if samples.len() < 2 || samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::config(format!("{}: need at least two samples with increasing x", path.display())));
    }
    Ok(samples)
}

fn trapezoid(s: &[(f64, f64)]) -> f64 {
    s.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

fn interpolate(s: &[(f64, f64)], x: f64) -> f64 {
    if x < s[0].0 || x > s[s.len() - 1].0 {
        return 0.0;
    }
    let k = s.partition_point(|p| p.0 <= x).clamp(1, s.len() - 1);
    let (a, b) = (s[k - 1], s[k]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::moment;

    #[test]
    fn polyexp_satisfies_boundary_condition_and_mass() {
        let d = InitialDatum::parse("family=polyexp rate=2 curvature=2").unwrap();
        let f = d.density(1.0).unwrap();
        let h = 1e-6;
        let slope = (f(h) - f(0.0)) / h;
        assert!((slope + f(0.0).powi(2)).abs() < 1e-5);
        let field = d.field(Grid::new(30.0, 3000).unwrap(), 1.0).unwrap();
        assert!((field.mass() - 1.0).abs() < 1e-14);
        assert!((moment(&field, 1).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn bump_first_moment() {
        let d = InitialDatum::parse("family=bump rate=4").unwrap();
        let field = d.field(Grid::new(12.5, 5000).unwrap(), 2.0).unwrap();
        assert!((moment(&field, 1).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(InitialDatum::parse("family=exponential").is_err());
        assert!(InitialDatum::parse("family=exponential rate=1 extra=2").is_err());
        assert!(InitialDatum::parse("family=nope rate=1").is_err());
        assert!(InitialDatum::parse("rate=1").is_err());
        assert!(InitialDatum::parse("family=perturbed rate=1 amplitude=1.5 wavenumber=2").is_err());
    }

    #[test]
    fn csv_datum_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut text = String::from("x,n\n");
        for k in 0..=2000 {
            let x = k as f64 * 0.01;
            text.push_str(&format!("{x},{}\n", (-x).exp()));
        }
        std::fs::write(&path, text).unwrap();
        let spec = InitialDatum::rebase_spec("csv=d.csv", dir.path());
        let d = InitialDatum::parse(&spec).unwrap();
        let field = d.field(Grid::new(20.0, 400).unwrap(), 1.0).unwrap();
        assert!((moment(&field, 1).unwrap() - 1.0).abs() < 1e-3);
    }
}
