//! Exact finite-sample null distribution of `S_n(s)`.
//!
//! The event `{S_n(s) ≤ λ}` is rewritten as `{a_i ≤ U_(i) ≤ b_i, i = 1..n}`
//! by inverting the kernel on every constancy interval of the empirical
//! d.f., and the containment probability of uniform order statistics in the
//! band is computed with Noé's recursion.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::divergence::{invert_in_v, DivergenceOrder};
use crate::error::{domain, Error, Result};

/// Largest sample size handled by the exact engine unless configured otherwise.
pub const DEFAULT_N_MAX: usize = 3000;

/// Lower and upper bounds `(a_i, b_i)` on the uniform order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderStatBand {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl OrderStatBand {
    /// Builds a band and closes it monotonically (`a` by running maximum,
    /// `b` by suffix minimum), which leaves the containment event unchanged.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return domain("band bounds must be nonempty and of equal length");
        }
        if lower.iter().chain(upper.iter()).any(|x| !(0.0..=1.0).contains(x)) {
            return domain("band bounds must lie in [0, 1]");
        }
        let mut band = OrderStatBand { lower, upper };
        band.isotonize();
        Ok(band)
    }

    fn isotonize(&mut self) {
        let mut run = 0.0_f64;
        for a in self.lower.iter_mut() {
            run = run.max(*a);
            *a = run;
        }
        let mut run = 1.0_f64;
        for b in self.upper.iter_mut().rev() {
            run = run.min(*b);
            *b = run;
        }
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `a_i ≤ b_i` for every `i`.
    pub fn is_feasible(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(a, b)| a <= b)
    }

    /// Whether sorted uniforms `u` satisfy every constraint.
    pub fn contains(&self, sorted: &[f64]) -> bool {
        sorted.len() == self.n()
            && sorted.iter().zip(self.lower.iter().zip(&self.upper)).all(|(u, (a, b))| a <= u && u <= b)
    }
}

/// The band equivalent to `{S_n(s) ≤ λ}`.
///
/// `a_i` is the lower end of `{v : K_s(i/n, v) ≤ λ}` and `b_i` the upper end
/// of `{v : K_s((i-1)/n, v) ≤ λ}`. For `s < 1` the constraints coming from
/// `x < X_(1)` and `x ≥ X_(n)` are absent, matching the restricted supremum.
pub fn band_constraints(n: usize, order: DivergenceOrder, lambda: f64) -> Result<OrderStatBand> {
    if n == 0 {
        return Err(Error::SizeOutOfRange { n, reason: "n must be positive".into() });
    }
    if lambda.is_nan() || lambda < 0.0 {
        return domain(format!("level must be nonnegative, got {lambda}"));
    }
    let nf = n as f64;
    let ends: Vec<(f64, f64)> =
        (0..=n).map(|i| invert_in_v(order, i as f64 / nf, lambda)).collect::<Result<_>>()?;
    let mut lower: Vec<f64> = (1..=n).map(|i| ends[i].0).collect();
    let mut upper: Vec<f64> = (1..=n).map(|i| ends[i - 1].1).collect();
    if order.s() < 1.0 {
        // S_1(s) = K_s(1, X_(1)) for n = 1 keeps the lower constraint.
        if n > 1 {
            lower[n - 1] = 0.0;
        }
        upper[0] = 1.0;
    }
    OrderStatBand::new(lower, upper)
}

/// 2^-600: rescaling threshold of the count distribution.
const RESCALE_LOW: f64 = f64::from_bits(423u64 << 52);

/// `P(a_i ≤ U_(i) ≤ b_i, i = 1..n)` for the order statistics of `n` uniforms.
///
/// Dynamic programming over the merged breakpoints `{a_i} ∪ {b_i} ∪ {1}`:
/// the count `N(c)` of observations `≤ c` must satisfy
/// `#{b_i ≤ c} ≤ N(c) ≤ #{a_i < c}`. The state is the joint probability of
/// `N(c) = k` and all constraints so far; given `N(c') = j` at the previous
/// breakpoint, `N(c) − j` is binomial with `n − j` trials and success
/// probability `(c − c')/(1 − c')`. Working with probabilities (rather than
/// multinomial weights) keeps every entry in `[0, 1]`, so only negligible
/// terms can underflow.
pub fn noe_probability(band: &OrderStatBand) -> f64 {
    let n = band.n();
    let a = band.lower();
    let b = band.upper();
    if !band.is_feasible() || b[0] <= 0.0 || a[n - 1] >= 1.0 {
        return 0.0;
    }
    let mut points: Vec<f64> = a.iter().chain(b.iter()).cloned().filter(|&c| c > 0.0 && c < 1.0).collect();
    points.push(1.0);
    points.sort_by(|x, y| x.partial_cmp(y).expect("finite bounds"));
    points.dedup();
    let ln_fact: Vec<f64> = (0..=n).map(|k| ln_gamma(k as f64 + 1.0)).collect();

    let mut lo = 0usize;
    let mut mass = vec![1.0_f64];
    // The true probabilities are `mass · 2^exponent`.
    let mut exponent = 0i64;
    let mut prev = 0.0_f64;
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut next: Vec<f64> = Vec::new();
    for &c in &points {
        while ia < n && a[ia] < c {
            ia += 1;
        }
        while ib < n && b[ib] <= c {
            ib += 1;
        }
        let (new_lo, new_hi) = if c >= 1.0 { (n, n) } else { (ib.max(lo), ia.min(n)) };
        if new_lo > new_hi || new_hi < lo {
            return 0.0;
        }
        let r = if c >= 1.0 { 1.0 } else { ((c - prev) / (1.0 - prev)).clamp(0.0, 1.0) };
        prev = c;
        next.clear();
        next.resize(new_hi - new_lo + 1, 0.0);
        for (offset, &w) in mass.iter().enumerate() {
            let j = lo + offset;
            if w == 0.0 || j > new_hi {
                continue;
            }
            let trials = n - j;
            let (d_lo, d_hi) = (new_lo.max(j) - j, new_hi - j);
            let mut add = |d: usize, pmf: f64| next[j + d - new_lo] += w * pmf;
            if r >= 1.0 || r <= 0.0 {
                let d = if r >= 1.0 { trials } else { 0 };
                if (d_lo..=d_hi).contains(&d) {
                    add(d, 1.0);
                }
                continue;
            }
            // Start at the mode (clamped into range) and walk outward: the
            // pmf is unimodal, so terms only shrink and underflow is harmless.
            let mode = (((trials + 1) as f64 * r).floor() as usize).clamp(d_lo, d_hi);
            let (ln_r, ln_q) = (r.ln(), (-r).ln_1p());
            let ln_pmf = ln_fact[trials] - ln_fact[mode] - ln_fact[trials - mode]
                + mode as f64 * ln_r
                + (trials - mode) as f64 * ln_q;
            let at_mode = ln_pmf.exp();
            if at_mode == 0.0 {
                continue;
            }
            add(mode, at_mode);
            let odds = r / (1.0 - r);
            let mut pmf = at_mode;
            for d in mode + 1..=d_hi {
                pmf *= (trials - d + 1) as f64 / d as f64 * odds;
                if pmf == 0.0 {
                    break;
                }
                add(d, pmf);
            }
            let mut pmf = at_mode;
            for d in (d_lo..mode).rev() {
                pmf *= (d + 1) as f64 / (trials - d) as f64 / odds;
                if pmf == 0.0 {
                    break;
                }
                add(d, pmf);
            }
        }
        std::mem::swap(&mut mass, &mut next);
        lo = new_lo;
        let max = mass.iter().cloned().fold(0.0_f64, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        if max < RESCALE_LOW {
            let shift = max.log2().floor() as i32;
            let factor = 2f64.powi(-shift);
            for m in mass.iter_mut() {
                *m *= factor;
            }
            exponent += shift as i64;
        }
    }
    let m = mass[n - lo];
    if m <= 0.0 {
        return 0.0;
    }
    (m.ln() + exponent as f64 * std::f64::consts::LN_2).exp().clamp(0.0, 1.0)
}

/// Settings of the exact engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactConfig {
    pub n_max: usize,
    /// Relative tolerance of the quantile bisection.
    pub quantile_rel_tol: f64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { n_max: DEFAULT_N_MAX, quantile_rel_tol: 1e-9 }
    }
}

fn check_n(n: usize, config: &ExactConfig) -> Result<()> {
    if n == 0 || n > config.n_max {
        return Err(Error::SizeOutOfRange {
            n,
            reason: format!("exact null distribution supports 1 <= n <= {}", config.n_max),
        });
    }
    Ok(())
}

/// `P(S_n(s) ≤ λ)` under the uniform null.
pub fn cdf_exact_with(n: usize, order: DivergenceOrder, lambda: f64, config: &ExactConfig) -> Result<f64> {
    check_n(n, config)?;
    if lambda.is_nan() || lambda < 0.0 {
        return domain(format!("level must be nonnegative, got {lambda}"));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if lambda.is_infinite() {
        return Ok(1.0);
    }
    Ok(noe_probability(&band_constraints(n, order, lambda)?))
}

pub fn cdf_exact(n: usize, order: DivergenceOrder, lambda: f64) -> Result<f64> {
    cdf_exact_with(n, order, lambda, &ExactConfig::default())
}

/// Smallest `λ` with `P(S_n(s) ≤ λ) ≥ 1 − α`, to the configured relative tolerance.
pub fn quantile_exact_with(n: usize, order: DivergenceOrder, alpha: f64, config: &ExactConfig) -> Result<f64> {
    check_n(n, config)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let target = 1.0 - alpha;
    let cdf = |lambda: f64| cdf_exact_with(n, order, lambda, config);
    let mut lo = 1e-8;
    let mut hi = 10.0 + (n as f64).ln();
    while cdf(lo)? >= target {
        hi = lo;
        lo *= 0.01;
        if lo < 1e-300 {
            return Ok(hi);
        }
    }
    let mut expansions = 0;
    while cdf(hi)? < target {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Numeric(format!("quantile bracket failed for n = {n}, s = {}", order.s())));
        }
    }
    while hi - lo > config.quantile_rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn quantile_exact(n: usize, order: DivergenceOrder, alpha: f64) -> Result<f64> {
    quantile_exact_with(n, order, alpha, &ExactConfig::default())
}

/// Exact p-value `P(S_n(s) ≥ t) = 1 − P(S_n(s) ≤ t)` (the law is atomless).
pub fn pvalue_exact(n: usize, order: DivergenceOrder, statistic: f64) -> Result<f64> {
    Ok((1.0 - cdf_exact(n, order, statistic)?).clamp(0.0, 1.0))
}

/// Persistent store of exact quantiles, one CSV row `n,s,alpha,q` each.
#[derive(Debug, Clone, Default)]
pub struct QuantileCache {
    entries: HashMap<(usize, u64, u64), f64>,
}

impl QuantileCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: usize, s: f64, alpha: f64) -> Option<f64> {
        self.entries.get(&(n, s.to_bits(), alpha.to_bits())).copied()
    }

    pub fn insert(&mut self, n: usize, s: f64, alpha: f64, q: f64) {
        self.entries.insert((n, s.to_bits(), alpha.to_bits()), q);
    }

    /// Cached quantile, computing and storing it on a miss.
    pub fn quantile(&mut self, n: usize, order: DivergenceOrder, alpha: f64) -> Result<f64> {
        if let Some(q) = self.get(n, order.s(), alpha) {
            return Ok(q);
        }
        let q = quantile_exact(n, order, alpha)?;
        self.insert(n, order.s(), alpha, q);
        Ok(q)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut cache = QuantileCache::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 fields", lineno + 1)));
            }
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 1));
            let n: usize = fields[0].parse().map_err(|_| bad("n"))?;
            let s: f64 = fields[1].parse().map_err(|_| bad("s"))?;
            let alpha: f64 = fields[2].parse().map_err(|_| bad("alpha"))?;
            let q: f64 = fields[3].parse().map_err(|_| bad("q"))?;
            cache.insert(n, s, alpha, q);
        }
        Ok(cache)
    }

    pub fn to_csv(&self) -> String {
        let mut rows: Vec<_> = self
            .entries
            .iter()
            .map(|(&(n, s, a), &q)| (n, f64::from_bits(s), f64::from_bits(a), q))
            .collect();
        rows.sort_by(|x, y| (x.0, x.1, x.2).partial_cmp(&(y.0, y.1, y.2)).expect("finite keys"));
        let mut out = String::from("n,s,alpha,q\n");
        for (n, s, a, q) in rows {
            let _ = writeln!(out, "{n},{s:.16e},{a:.16e},{q:.16e}");
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
