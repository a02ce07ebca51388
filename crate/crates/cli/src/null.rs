//! Null hypotheses for the probability integral transform.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use statrs::distribution::{Cauchy, ContinuousCDF, Exp, Laplace, LogNormal, Normal, Uniform};

use crate::CliError;

/// A fully specified continuous null d.f. `F₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum NullSpec {
    /// Data already on the probability scale.
    Uniform,
    UniformOn { lo: f64, hi: f64 },
    Normal { mu: f64, sigma: f64 },
    Logistic { mu: f64, scale: f64 },
    Cauchy { location: f64, scale: f64 },
    Laplace { mu: f64, scale: f64 },
    Exponential { location: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// Piecewise-linear d.f. through `(y, F₀(y))` points read from a file.
    Grid {
        path: PathBuf,
        #[serde(skip)]
        points: Vec<(f64, f64)>,
    },
}

impl fmt::Display for NullSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullSpec::Uniform => write!(f, "uniform"),
            NullSpec::UniformOn { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            NullSpec::Normal { mu, sigma } => write!(f, "normal:{mu},{sigma}"),
            NullSpec::Logistic { mu, scale } => write!(f, "logistic:{mu},{scale}"),
            NullSpec::Cauchy { location, scale } => write!(f, "cauchy:{location},{scale}"),
            NullSpec::Laplace { mu, scale } => write!(f, "laplace:{mu},{scale}"),
            NullSpec::Exponential { location, scale } => write!(f, "exponential:{location},{scale}"),
            NullSpec::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
            NullSpec::Grid { path, .. } => write!(f, "grid:{}", path.display()),
        }
    }
}

fn params(family: &str, args: Option<&str>, defaults: [f64; 2]) -> Result<[f64; 2], CliError> {
    let Some(args) = args else { return Ok(defaults) };
    let values: Vec<f64> = args
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("null '{family}': parameters must be numbers, got '{args}'")))?;
    match values[..] {
        [a, b] if a.is_finite() && b.is_finite() => Ok([a, b]),
        _ => Err(CliError::Usage(format!("null '{family}' takes two finite parameters, got '{args}'"))),
    }
}

fn read_grid(path: PathBuf) -> Result<NullSpec, CliError> {
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields[..] {
            [y, p] => y.parse::<f64>().ok().zip(p.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((y, p)) if y.is_finite() && (0.0..=1.0).contains(&p) => points.push((y, p)),
            // A header row is allowed as the first record.
            _ if points.is_empty() && lineno == 0 => {}
            _ => return Err(CliError::Data(format!("{}:{}: expected 'y,p' with p in [0, 1]", path.display(), lineno + 1))),
        }
    }
    if points.len() < 2 {
        return Err(CliError::Data(format!("{}: a quantile grid needs at least two points", path.display())));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 >= w[0].1)) {
        return Err(CliError::Data(format!("{}: grid must be increasing in y and non-decreasing in p", path.display())));
    }
    Ok(NullSpec::Grid { path, points })
}

impl FromStr for NullSpec {
    type Err = CliError;

    /// `family[:p1,p2]` or `grid:PATH`.
    fn from_str(spec: &str) -> Result<Self, CliError> {
        let (family, args) = match spec.split_once(':') {
            Some((f, a)) => (f.trim().to_ascii_lowercase(), Some(a)),
            None => (spec.trim().to_ascii_lowercase(), None),
        };
        let scale_ok = |v: [f64; 2]| -> Result<[f64; 2], CliError> {
            if v[1] > 0.0 {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("null '{family}': scale must be positive")))
            }
        };
        Ok(match family.as_str() {
            "uniform" if args.is_none() => NullSpec::Uniform,
            "uniform" => {
                let [lo, hi] = params(&family, args, [0.0, 1.0])?;
                if !(hi > lo) {
                    return Err(CliError::Usage("null 'uniform': need lo < hi".into()));
                }
                NullSpec::UniformOn { lo, hi }
            }
            "normal" => {
                let [mu, sigma] = scale_ok(params(&family, args, [0.0, 1.0])?)?;
                NullSpec::Normal { mu, sigma }
            }
            "logistic" => {
                let [mu, scale] = scale_ok(params(&family, args, [0.0, 1.0])?)?;
                NullSpec::Logistic { mu, scale }
            }
            "cauchy" => {
                let [location, scale] = scale_ok(params(&family, args, [0.0, 1.0])?)?;
                NullSpec::Cauchy { location, scale }
            }
            "laplace" => {
                let [mu, scale] = scale_ok(params(&family, args, [0.0, 1.0])?)?;
                NullSpec::Laplace { mu, scale }
            }
            "exponential" => {
                let [location, scale] = scale_ok(params(&family, args, [0.0, 1.0])?)?;
                NullSpec::Exponential { location, scale }
            }
            "lognormal" => {
                let [mu, sigma] = scale_ok(params(&family, args, [0.0, 1.0])?)?;
                NullSpec::LogNormal { mu, sigma }
            }
            "grid" => match args {
                Some(path) if !path.is_empty() => read_grid(PathBuf::from(path))?,
                _ => return Err(CliError::Usage("null 'grid' needs a file: grid:PATH".into())),
            },
            other => {
                return Err(CliError::Usage(format!(
                    "unknown null family '{other}' (uniform, normal, logistic, cauchy, laplace, exponential, lognormal, grid)"
                )))
            }
        })
    }
}

fn grid_cdf(points: &[(f64, f64)], y: f64) -> f64 {
    let k = points.partition_point(|p| p.0 <= y);
    if k == 0 {
        return 0.0;
    }
    if k == points.len() {
        return 1.0;
    }
    let ((y0, p0), (y1, p1)) = (points[k - 1], points[k]);
    p0 + (p1 - p0) * (y - y0) / (y1 - y0)
}

impl NullSpec {
    /// `F₀(y)`.
    pub fn cdf(&self, y: f64) -> f64 {
        let built = "parameters validated on parse";
        match *self {
            NullSpec::Uniform => y,
            NullSpec::UniformOn { lo, hi } => Uniform::new(lo, hi).expect(built).cdf(y),
            NullSpec::Normal { mu, sigma } => Normal::new(mu, sigma).expect(built).cdf(y),
            NullSpec::Logistic { mu, scale } => 1.0 / (1.0 + (-(y - mu) / scale).exp()),
            NullSpec::Cauchy { location, scale } => Cauchy::new(location, scale).expect(built).cdf(y),
            NullSpec::Laplace { mu, scale } => Laplace::new(mu, scale).expect(built).cdf(y),
            NullSpec::Exponential { location, scale } => Exp::new(1.0 / scale).expect(built).cdf(y - location),
            NullSpec::LogNormal { mu, sigma } => LogNormal::new(mu, sigma).expect(built).cdf(y),
            NullSpec::Grid { ref points, .. } => grid_cdf(points, y),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let n: NullSpec = "normal:1,2".parse().unwrap();
        assert!((n.cdf(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(n.to_string(), "normal:1,2");
        assert_eq!("uniform".parse::<NullSpec>().unwrap(), NullSpec::Uniform);
        assert!(("logistic".parse::<NullSpec>().unwrap().cdf(0.0) - 0.5).abs() < 1e-15);
        assert!(("exponential:1,2".parse::<NullSpec>().unwrap().cdf(3.0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!(matches!("normal:0,-1".parse::<NullSpec>(), Err(CliError::Usage(_))));
        assert!(matches!("weibull".parse::<NullSpec>(), Err(CliError::Usage(_))));
        assert!(matches!("normal:a,b".parse::<NullSpec>(), Err(CliError::Usage(_))));
    }

    #[test]
    fn grid_interpolates() {
        let pts = [(0.0, 0.0), (10.0, 0.5), (20.0, 1.0)];
        assert_eq!(grid_cdf(&pts, 5.0), 0.25);
        assert_eq!(grid_cdf(&pts, -1.0), 0.0);
        assert_eq!(grid_cdf(&pts, 25.0), 1.0);
    }
}
