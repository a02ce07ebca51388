//! Simultaneous confidence bands obtained by inverting `S_n(s, F) ≤ q`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::asymptotic::quantile_asymptotic;
use crate::divergence::{invert_in_v, DivergenceOrder};
use crate::error::{domain, Result};
use crate::exact::{quantile_exact_with, ExactConfig, QuantileCache};
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Asymptotic,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Asymptotic => "asymptotic",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "asymptotic" => Ok(Method::Asymptotic),
            other => Err(crate::Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// `q_n(s, α)` and the method that actually produced it.
///
/// `Exact` falls back to the asymptotic quantile (with a warning) when `n`
/// exceeds the exact engine's limit.
pub fn critical_value(
    n: usize,
    order: DivergenceOrder,
    alpha: f64,
    method: Method,
    config: &ExactConfig,
    cache: Option<&mut QuantileCache>,
) -> Result<(f64, Method)> {
    if method == Method::Exact && n <= config.n_max {
        let q = match cache {
            Some(cache) => match cache.get(n, order.s(), alpha) {
                Some(q) => q,
                None => {
                    let q = quantile_exact_with(n, order, alpha, config)?;
                    cache.insert(n, order.s(), alpha, q);
                    q
                }
            },
            None => quantile_exact_with(n, order, alpha, config)?,
        };
        return Ok((q, Method::Exact));
    }
    if method == Method::Exact {
        log::warn!("n = {n} exceeds the exact limit {}; using the asymptotic quantile", config.n_max);
    }
    Ok((quantile_asymptotic(n, order.s(), alpha)?, Method::Asymptotic))
}

/// A step band `L ≤ F ≤ U`, constant on the intervals cut by the distinct sample values.
///
/// Interval `0` is `[0, x_1)`, interval `k` is `[x_k, x_{k+1})` and the last one is `[x_m, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepBand {
    pub s: f64,
    pub alpha: f64,
    pub method: Method,
    pub n: usize,
    pub level: f64,
    breakpoints: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl StepBand {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn intervals(&self) -> usize {
        self.lower.len()
    }

    /// `[left, right)` of interval `k`.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        let left = if k == 0 { 0.0 } else { self.breakpoints[k - 1] };
        let right = self.breakpoints.get(k).copied().unwrap_or(1.0);
        (left, right)
    }

    /// `(L(x), U(x))`.
    pub fn at(&self, x: f64) -> (f64, f64) {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        (self.lower[k], self.upper[k])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_left,x_right,L,U\n");
        for k in 0..self.intervals() {
            let (l, r) = self.interval(k);
            writeln!(out, "{l},{r},{},{}", self.lower[k], self.upper[k]).expect("write to string");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("band serializes")
    }
}

/// The band at an explicit level `q`.
pub fn band_at_level(sample: &Sample, order: DivergenceOrder, q: f64, alpha: f64, method: Method) -> Result<StepBand> {
    if q.is_nan() || q < 0.0 {
        return domain(format!("level must be nonnegative, got {q}"));
    }
    let n = sample.n();
    let restricted = order.s() < 1.0;
    let segments: Vec<_> = sample.segments().collect();
    let mut lower = Vec::with_capacity(segments.len());
    let mut upper = Vec::with_capacity(segments.len());
    let last = segments.len() - 1;
    for (k, seg) in segments.iter().enumerate() {
        // With n = 1 the restricted supremum reduces to the single point X_(1).
        let outer = k == 0 || (k == last && n > 1);
        let (l, u) = if restricted && outer { (0.0, 1.0) } else { invert_in_v(order, seg.level, q)? };
        lower.push(l.clamp(0.0, 1.0));
        upper.push(u.clamp(0.0, 1.0));
    }
    for k in 1..lower.len() {
        lower[k] = lower[k].max(lower[k - 1]);
    }
    for k in (0..upper.len() - 1).rev() {
        upper[k] = upper[k].min(upper[k + 1]);
    }
    let breakpoints = segments.iter().skip(1).map(|seg| seg.left).collect();
    Ok(StepBand { s: order.s(), alpha, method, n, level: q, breakpoints, lower, upper })
}

/// The `1 − α` simultaneous band for the d.f. of the (probability-scale) sample.
pub fn band(sample: &Sample, order: DivergenceOrder, alpha: f64, method: Method) -> Result<StepBand> {
    band_with(sample, order, alpha, method, &ExactConfig::default(), None)
}

pub fn band_with(
    sample: &Sample,
    order: DivergenceOrder,
    alpha: f64,
    method: Method,
    config: &ExactConfig,
    cache: Option<&mut QuantileCache>,
) -> Result<StepBand> {
    let (q, used) = critical_value(sample.n(), order, alpha, method, config, cache)?;
    band_at_level(sample, order, q, alpha, used)
}

/// Whether a continuous d.f. `f` stays inside the band.
///
/// On each interval a monotone `f` ranges over `[f(left), f(right)]`, so the
/// interval endpoints are the only places to check.
pub fn band_covers<F: Fn(f64) -> f64>(band: &StepBand, f: F) -> bool {
    (0..band.intervals()).all(|k| {
        let (l, r) = band.interval(k);
        band.lower[k] <= f(l) && f(r) <= band.upper[k]
    })
}
