//! Closed-form profile tables for the `profile` subcommand.
//!
//! Spec strings use the datum syntax. Besides the datum families
//! (`exponential`, `polyexp`, `gaussian_tail`, `bump`, `perturbed`, which
//! take an optional `mass`, default 1) there are:
//!
//! * `family=selfsimilar mass=M [t=T]`: `G_α` for `M < 1`, dilated to time `t`;
//! * `family=supersolution lambda=λ mu=μ [t=T]`: the integrated supersolution;
//! * `family=chebyshev mass=M first_moment=J`: `max(0, M − J/x)`.

use crate::error::{Error, Result};
use crate::harness::datum::InitialDatum;
use crate::profiles::{chebyshev_lower_bound, GaussianTailProfile, Profile, SelfSimilarSupersolution};

fn take(pairs: &mut Vec<(String, String)>, key: &str) -> Result<Option<f64>> {
    match pairs.iter().position(|(k, _)| k == key) {
        None => Ok(None),
        Some(i) => {
            let (_, v) = pairs.remove(i);
            v.parse().map(Some).map_err(|_| Error::config(format!("'{key}' is not a number: {v}")))
        }
    }
}

fn required(pairs: &mut Vec<(String, String)>, key: &str) -> Result<f64> {
    take(pairs, key)?.ok_or_else(|| Error::config(format!("profile spec is missing '{key}'")))
}

fn finish(pairs: &[(String, String)]) -> Result<()> {
    match pairs.first() {
        Some((k, _)) => Err(Error::config(format!("unknown key '{k}' in profile spec"))),
        None => Ok(()),
    }
}

/// `(x, value)` at `points` equally spaced nodes of `[0, x_max]`.
pub fn profile_table(spec: &str, x_max: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if !(x_max > 0.0) || points < 2 {
        return Err(Error::config("a table needs x_max > 0 and at least 2 points"));
    }
    let xs: Vec<f64> = (0..points).map(|i| x_max * i as f64 / (points - 1) as f64).collect();
    let mut pairs: Vec<(String, String)> = spec
        .split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::config(format!("expected key=value, got '{tok}'")))
        })
        .collect::<Result<_>>()?;
    let family = pairs.iter().find(|(k, _)| k == "family").map(|(_, v)| v.clone()).unwrap_or_default();
    let values: Vec<f64> = match family.as_str() {
        "selfsimilar" => {
            pairs.retain(|(k, _)| k != "family");
            let mass = required(&mut pairs, "mass")?;
            let t = take(&mut pairs, "t")?.unwrap_or(0.0);
            finish(&pairs)?;
            let g = GaussianTailProfile::steady_state(mass)?;
            let p = g.at_time(t);
            xs.iter().map(|&x| p.density(x)).collect()
        }
        "supersolution" => {
            pairs.retain(|(k, _)| k != "family");
            let s = SelfSimilarSupersolution::new(required(&mut pairs, "lambda")?, required(&mut pairs, "mu")?)?;
            let t = take(&mut pairs, "t")?.unwrap_or(0.0);
            finish(&pairs)?;
            xs.iter().map(|&x| s.value(t, x)).collect::<Result<_>>()?
        }
        "chebyshev" => {
            pairs.retain(|(k, _)| k != "family");
            let mass = required(&mut pairs, "mass")?;
            let j = required(&mut pairs, "first_moment")?;
            finish(&pairs)?;
            xs.iter()
                .map(|&x| if x > 0.0 { chebyshev_lower_bound(mass, j, x) } else { Ok(0.0) })
                .collect::<Result<_>>()?
        }
        _ => {
            let mass = take(&mut pairs, "mass")?.unwrap_or(1.0);
            let rest: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let f = InitialDatum::parse(&rest.join(" "))?.density(mass)?;
            xs.iter().map(|&x| f(x)).collect()
        }
    };
    Ok(xs.into_iter().zip(values).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_table() {
        let t = profile_table("family=exponential rate=2", 1.0, 3).unwrap();
        assert_eq!(t.len(), 3);
        assert!((t[1].1 - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn supersolution_and_chebyshev_tables() {
        let t = profile_table("family=supersolution lambda=0 mu=2", 2.0, 5).unwrap();
        assert!((t[4].1 - (1.0 - (-4.0f64).exp())).abs() < 1e-14);
        let c = profile_table("family=chebyshev mass=1 first_moment=1", 4.0, 5).unwrap();
        assert_eq!(c[0].1, 0.0);
        assert!((c[4].1 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(profile_table("family=selfsimilar mass=0.5 beta=1", 1.0, 3).is_err());
        assert!(profile_table("family=exponential rate=1", 1.0, 1).is_err());
    }
}
