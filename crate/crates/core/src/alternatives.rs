//! Alternative distributions on `[0, 1]`, natural parameters, efficacies and
//! the Poisson-process limit laws under the boundary alternatives.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::divergence::{kdiv_log_u, kdiv_unchecked, DivergenceOrder, KernelValue, LOG_TINY};
use crate::error::{domain, Error, Result};
use crate::normal;
use crate::quadrature::{dyadic_unit, TailedIntegral};
use crate::rng::sorted_uniforms;
use crate::sample::Sample;

/// Piecewise-linear d.f. through user-supplied points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCdf {
    x: Vec<f64>,
    f: Vec<f64>,
}

impl GridCdf {
    /// Points are sorted by `x`; `(0, 0)` and `(1, 1)` are added when missing.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|(x, f)| !(0.0..=1.0).contains(x) || !(0.0..=1.0).contains(f)) {
            return domain("grid points must lie in [0, 1] x [0, 1]");
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        if points.first().map_or(true, |p| p.0 > 0.0) {
            points.insert(0, (0.0, 0.0));
        }
        if points.last().map_or(true, |p| p.0 < 1.0) {
            points.push((1.0, 1.0));
        }
        if points.windows(2).any(|w| w[1].1 < w[0].1 || w[1].0 == w[0].0) {
            return domain("grid d.f. must be nondecreasing with distinct x values");
        }
        if points[0].1 != 0.0 || points[points.len() - 1].1 != 1.0 {
            return domain("grid d.f. must start at 0 and end at 1");
        }
        let (x, f) = points.into_iter().unzip();
        Ok(GridCdf { x, f })
    }

    /// Rows `x,F(x)`; an optional header line and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let parsed = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some(p) => points.push(p),
                None if points.is_empty() && lineno == 0 => continue,
                None => return Err(Error::Parse(format!("line {}: expected 'x,F(x)'", lineno + 1))),
            }
        }
        GridCdf::new(points)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.x.partition_point(|&g| g <= x);
        if k == 0 {
            return 0.0;
        }
        if k == self.x.len() {
            return 1.0;
        }
        let (x0, x1, f0, f1) = (self.x[k - 1], self.x[k], self.f[k - 1], self.f[k]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    /// `inf { x : F(x) ≥ p }`.
    pub fn quantile(&self, p: f64) -> f64 {
        let k = self.f.partition_point(|&g| g < p).max(1);
        let (x0, x1, f0, f1) = (self.x[k - 1], self.x[k], self.f[k - 1], self.f[k]);
        x0 + (x1 - x0) * (p - f0) / (f1 - f0)
    }
}

/// `ln(1 + c · expm1(y))` for `c > 0`, `y ≥ 0`, without overflow.
fn ln1p_scaled_expm1(c: f64, y: f64) -> f64 {
    let z = c * y.exp_m1();
    if z.is_finite() {
        z.ln_1p()
    } else {
        y + c.ln()
    }
}

/// A continuous d.f. on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlternativeCdf {
    Uniform,
    /// The boundary d.f. `F_s` for `s ≥ 1` or `s < 0`.
    PoissonBoundary { s: f64 },
    /// `exp(-(1/x - 1))`.
    TildeF0,
    /// Law of `1 − Φ(Y)` with `Y ~ (1 − ε) N(0, 1) + ε N(μ, 1)`.
    Mixture { epsilon: f64, mu: f64 },
    UserGrid(GridCdf),
}

impl AlternativeCdf {
    pub fn poisson_boundary(s: f64) -> Result<Self> {
        if !s.is_finite() || (0.0..1.0).contains(&s) {
            return domain(format!("Poisson boundary d.f.s exist for s >= 1 or s < 0, got {s}"));
        }
        Ok(AlternativeCdf::PoissonBoundary { s })
    }

    pub fn mixture(epsilon: f64, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !(mu >= 0.0 && mu.is_finite()) {
            return domain(format!("mixture needs epsilon in [0, 1] and mu >= 0, got ({epsilon}, {mu})"));
        }
        Ok(AlternativeCdf::Mixture { epsilon, mu })
    }

    /// Checks monotonicity and the end values on a grid.
    pub fn validate(&self) -> Result<()> {
        const POINTS: usize = 10_000;
        let mut prev = 0.0;
        for i in 0..=POINTS {
            let x = i as f64 / POINTS as f64;
            let f = self.cdf(x);
            if !(0.0..=1.0).contains(&f) || f < prev {
                return Err(Error::Numeric(format!("d.f. invalid at x = {x}: F = {f}")));
            }
            prev = f;
        }
        if self.cdf(0.0) != 0.0 || (self.cdf(1.0) - 1.0).abs() > 1e-12 {
            return Err(Error::Numeric("d.f. does not run from 0 to 1".into()));
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            AlternativeCdf::Uniform => x,
            AlternativeCdf::Mixture { epsilon, mu } => {
                (1.0 - epsilon) * x + epsilon * normal::sf(normal::sf_inv(x) - mu)
            }
            AlternativeCdf::UserGrid(grid) => grid.cdf(x),
            _ => self.ln_cdf(x).exp(),
        }
    }

    /// `ln F(x)`, accurate where `F(x)` underflows.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if x >= 1.0 {
            return 0.0;
        }
        match *self {
            AlternativeCdf::PoissonBoundary { s } => {
                let lx = x.ln();
                if s == 1.0 {
                    -(-lx).ln_1p()
                } else if s > 1.0 {
                    -ln1p_scaled_expm1(1.0 / (s - 1.0), (1.0 - s) * lx) / s
                } else {
                    ln1p_scaled_expm1(-s, (s - 1.0) * lx) / s
                }
            }
            AlternativeCdf::TildeF0 => 1.0 - 1.0 / x,
            _ => self.cdf(x).ln(),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(match self {
            AlternativeCdf::Uniform => p,
            AlternativeCdf::UserGrid(grid) => grid.quantile(p),
            AlternativeCdf::Mixture { .. } => self.mixture_quantile(p),
            _ => self.ln_quantile(p)?.exp(),
        })
    }

    /// `ln F⁻¹(p)`, accurate where the quantile underflows.
    pub fn ln_quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(match *self {
            AlternativeCdf::PoissonBoundary { s } => {
                let lp = p.ln();
                if s == 1.0 {
                    1.0 - 1.0 / p
                } else if s > 1.0 {
                    ln1p_scaled_expm1(s - 1.0, -s * lp) / (1.0 - s)
                } else {
                    ln1p_scaled_expm1(-1.0 / s, s * lp) / (s - 1.0)
                }
            }
            AlternativeCdf::TildeF0 => -(-p.ln()).ln_1p(),
            _ => self.quantile(p)?.ln(),
        })
    }

    fn mixture_quantile(&self, p: f64) -> f64 {
        let AlternativeCdf::Mixture { epsilon, .. } = *self else { unreachable!() };
        // F(u) ≥ (1 − ε) u bounds the root from above.
        let (mut lo, mut hi) = (0.0_f64, (p / (1.0 - epsilon).max(f64::MIN_POSITIVE)).min(1.0));
        // Bisection in the log scale while the bracket spans orders of magnitude.
        while lo == 0.0 || hi / lo > 1.0 + 1e-15 {
            let mid = if lo == 0.0 { hi * 1e-3 } else { (lo * hi).sqrt() };
            if mid <= f64::MIN_POSITIVE {
                return hi;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if lo > 0.0 && hi - lo <= 1e-16 * hi {
                break;
            }
        }
        hi
    }

    /// `n` sorted draws.
    ///
    /// Fails when a draw underflows; use [`AlternativeCdf::sample_ln`] for such laws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Sample> {
        let values = match *self {
            AlternativeCdf::Mixture { epsilon, mu } => {
                let mut v: Vec<f64> = (0..n)
                    .map(|_| {
                        let z: f64 = rng.sample(StandardNormal);
                        let y = if rng.gen::<f64>() < epsilon { z + mu } else { z };
                        normal::sf(y).min(1.0 - f64::EPSILON / 2.0)
                    })
                    .collect();
                v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                v
            }
            _ => sorted_uniforms(rng, n)
                .into_iter()
                .map(|u| self.quantile(u).map(|x| x.min(1.0 - f64::EPSILON / 2.0)))
                .collect::<Result<Vec<_>>>()?,
        };
        if values.first().is_some_and(|&x| x <= 0.0) {
            return Err(Error::Numeric("draw underflowed to 0; use log-scale sampling".into()));
        }
        Sample::from_sorted(values)
    }

    /// `n` sorted draws of `ln X`.
    pub fn sample_ln<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        match self {
            AlternativeCdf::Mixture { .. } => Ok(self.sample(rng, n)?.values().iter().map(|x| x.ln()).collect()),
            _ => sorted_uniforms(rng, n).into_iter().map(|u| self.ln_quantile(u)).collect(),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("probability must lie in (0, 1), got {p}"));
    }
    Ok(())
}

/// Sparse-mixture calibration `ε_n = n^{-β}`, `μ_n = √(2 r log n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub n: usize,
    pub beta: f64,
    pub r: f64,
}

impl MixtureParams {
    /// `β ∈ [1/2, 1)` (the endpoint 1/2 is the dense/sparse boundary), `r ∈ (0, 1)`.
    pub fn new(n: usize, beta: f64, r: f64) -> Result<Self> {
        if n < 2 || !(0.5..1.0).contains(&beta) || !(r > 0.0 && r < 1.0) {
            return domain(format!("need n >= 2, beta in [1/2, 1), r in (0, 1); got ({n}, {beta}, {r})"));
        }
        Ok(MixtureParams { n, beta, r })
    }

    pub fn epsilon(&self) -> f64 {
        (self.n as f64).powf(-self.beta)
    }

    pub fn mu(&self) -> f64 {
        (2.0 * self.r * (self.n as f64).ln()).sqrt()
    }

    pub fn alternative(&self) -> AlternativeCdf {
        AlternativeCdf::Mixture { epsilon: self.epsilon(), mu: self.mu() }
    }
}

/// A population supremum, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalParameter {
    pub value: f64,
    /// Location of the supremum (an endpoint when it is a boundary limit).
    pub argmax: f64,
    pub infinite: bool,
}

/// Options of the natural-parameter search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub grid_points: usize,
    /// Values above this that still grow toward an endpoint are reported as `+∞`.
    pub ceiling: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { grid_points: 100_000, ceiling: 1e8 }
    }
}

/// `K_s(F(x), x)` at `x = logistic(t)`.
fn kernel_on_logit(order: DivergenceOrder, alt: &AlternativeCdf, t: f64) -> KernelValue {
    let x = 1.0 / (1.0 + (-t).exp());
    if x <= 0.0 || x >= 1.0 {
        return KernelValue::Finite(0.0);
    }
    let ln_f = alt.ln_cdf(x);
    if ln_f < LOG_TINY {
        kdiv_log_u(order, ln_f, x)
    } else {
        kdiv_unchecked(order, alt.cdf(x), x)
    }
}

/// `sup_{0<x<1} K_s(F(x), x)`.
///
/// A logit grid from `e^{-700}` to `1 − 10^{-15}` concentrates points in both
/// tails; the best grid cell is refined by golden-section search.
pub fn natural_parameter(order: DivergenceOrder, alt: &AlternativeCdf) -> NaturalParameter {
    natural_parameter_with(order, alt, SearchOptions::default())
}

pub fn natural_parameter_with(order: DivergenceOrder, alt: &AlternativeCdf, options: SearchOptions) -> NaturalParameter {
    let (t_lo, t_hi) = (-700.0, 34.5);
    let m = options.grid_points.max(10);
    let step = (t_hi - t_lo) / (m - 1) as f64;
    let eval = |t: f64| kernel_on_logit(order, alt, t).to_f64();
    let values: Vec<f64> = (0..m).map(|i| eval(t_lo + i as f64 * step)).collect();
    let (best, &best_value) =
        values.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).expect("no NaN")).expect("nonempty grid");
    let logistic = |t: f64| 1.0 / (1.0 + (-t).exp());
    if best_value.is_infinite() {
        return NaturalParameter { value: f64::INFINITY, argmax: logistic(t_lo + best as f64 * step), infinite: true };
    }
    let at_edge = best == 0 || best == m - 1;
    if at_edge {
        let inward = if best == 0 { values[1] } else { values[m - 2] };
        let infinite = best_value > options.ceiling && best_value > inward;
        let argmax = if best == 0 { 0.0 } else { 1.0 };
        return NaturalParameter { value: if infinite { f64::INFINITY } else { best_value }, argmax, infinite };
    }
    // Golden-section maximisation on the bracketing cells.
    let (mut a, mut b) = (t_lo + (best - 1) as f64 * step, t_lo + (best + 1) as f64 * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d);
        }
    }
    let (t, v) = if fc >= fd { (c, fc) } else { (d, fd) };
    let (t, v) = if v >= best_value { (t, v) } else { (t_lo + best as f64 * step, best_value) };
    NaturalParameter { value: v, argmax: logistic(t), infinite: false }
}

/// `∫_0^1 [F⁻¹(u)(1 − F⁻¹(u))]^{-(s−1)/s} du`, whose finiteness is the
/// consistency condition for `s > 1`.
pub fn consistency_integral(order: DivergenceOrder, alt: &AlternativeCdf) -> Result<TailedIntegral> {
    let s = order.s();
    if s <= 1.0 {
        return domain(format!("the consistency integral is defined for s > 1, got {s}"));
    }
    let e = (s - 1.0) / s;
    // Near u = 1 the quantile rounds to 1; there 1 − F⁻¹(1 − δ) is linear in δ.
    let delta0 = 2f64.powi(-40);
    let slope = (1.0 - alt.quantile(1.0 - delta0)?) / delta0;
    let integrand = |u: f64, one_minus_u: f64| {
        let (lq, ln_one_minus_q) = if u < 0.5 {
            match alt.ln_quantile(u) {
                Ok(lq) => (lq, (-lq.exp()).ln_1p()),
                Err(_) => return f64::INFINITY,
            }
        } else if one_minus_u < delta0 {
            let c = slope * one_minus_u;
            ((-c).ln_1p(), c.ln())
        } else {
            match alt.quantile(1.0 - one_minus_u) {
                Ok(q) => (q.ln(), (-q).ln_1p()),
                Err(_) => return f64::INFINITY,
            }
        };
        (-e * (lq + ln_one_minus_q)).exp()
    };
    Ok(dyadic_unit(integrand, 1e-8))
}

/// `∫_0^1 F(x)(1 − F(x)) / (x(1 − x)) dx`, the consistency diagnostic at `s = 1`.
pub fn consistency_integral_kl(alt: &AlternativeCdf) -> TailedIntegral {
    dyadic_unit(
        |x, one_minus_x| {
            let f = alt.cdf(x);
            f * (1.0 - f) / (x * one_minus_x)
        },
        1e-8,
    )
}

/// Bahadur efficacy `g_s(a) = −log(1 − s(1 − s)a)/(1 − s)` for `0 < s < 1`.
pub fn efficacy(s: f64, a: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("efficacy requires 0 < s < 1, got {s}"));
    }
    let k = s * (1.0 - s);
    if !(a >= 0.0 && a < 1.0 / k) {
        return domain(format!("efficacy requires 0 <= a < 1/(s(1-s)) = {}, got {a}", 1.0 / k));
    }
    Ok(-(-k * a).ln_1p() / (1.0 - s))
}

/// The optimal detection boundary `ρ*(β)`.
pub fn rho_star(beta: f64) -> Result<f64> {
    if !(beta > 0.5 && beta < 1.0) {
        return domain(format!("rho_star requires 1/2 < beta < 1, got {beta}"));
    }
    Ok(if beta <= 0.75 { beta - 0.5 } else { (1.0 - (1.0 - beta).sqrt()).powi(2) })
}

/// `P(sup_{t ≥ S₁} t/ℕ(t) > x) = e^{-x} + Σ_{k≥1} (k−1)^{k−1}/k! · x^k e^{-kx}`.
///
/// Terms are summed in the log domain until one drops below `10^{-15}` of
/// the partial sum (at most ten million terms; convergence is slow near `x = 1`).
pub fn sup_ratio_tail(x: f64) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return domain(format!("sup_ratio_tail requires x > 1, got {x}"));
    }
    let mut sum = (-x).exp();
    let lx = x.ln();
    for k in 1..10_000_000u64 {
        let kf = k as f64;
        let lead = if k == 1 { 0.0 } else { (kf - 1.0) * (kf - 1.0).ln() };
        let term = (lead - ln_gamma(kf + 1.0) + kf * (lx - x)).exp();
        sum += term;
        if term < 1e-15 * sum {
            break;
        }
    }
    Ok(sum)
}

/// Probability bound on a future crossing of `level` by `S_{j+1}/j`.
///
/// Given `S_{K+1}`, a later `j = K + m` has `S_{j+1}/j > L` only if a
/// `Gamma(m)` variable exceeds `m L + D`, `D = L K − S_{K+1} ≥ 0`. Chernoff
/// gives `P ≤ exp(−m h(L + D/m))` with `h(a) = a − 1 − ln a`, and convexity of
/// `h` gives `m h(L + D/m) ≥ m h(L) + D h'(L)`. Summing the union bound over
/// `m ≥ 1`: `P ≤ exp(−D (1 − 1/L)) q/(1 − q)`, `q = exp(−h(L))`.
fn crossing_bound(level: f64, slack: f64) -> f64 {
    let h = level - 1.0 - level.ln();
    let q = (-h).exp();
    (-slack * (1.0 - 1.0 / level)).exp() * q / -(-h).exp_m1()
}

/// Path-length cap of [`sup_ratio_sampler`].
///
/// The law of the supremum has positive density at 1, where certifying the
/// maximum needs about `10/(M − 1)²` arrivals; the cap bounds the cost and
/// only affects draws with `M − 1 ≲ 2·10⁻³`, whose missed excursions are of
/// the same small size.
pub const MAX_ARRIVALS: u64 = 1 << 22;

/// `sup_{t ≥ S₁} t/ℕ(t) = sup_k S_{k+1}/k` for a unit-rate Poisson process.
///
/// The path is extended until the probability of a later excursion above the
/// running maximum is below `10^{-9}`, or [`MAX_ARRIVALS`] is reached.
pub fn sup_ratio_sampler<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let mut arrival: f64 = rng.sample(Exp1);
    let mut max_ratio = f64::NEG_INFINITY;
    for k in 1..=MAX_ARRIVALS {
        let gap: f64 = rng.sample(Exp1);
        arrival += gap;
        max_ratio = max_ratio.max(arrival / k as f64);
        if k % 64 == 0 && max_ratio > 1.0 && crossing_bound(max_ratio, max_ratio * k as f64 - arrival) < 1e-9 {
            break;
        }
    }
    max_ratio
}

/// Whether `sup_{t ≥ S₁} t/ℕ(t) > x` (for `x > 1`), decided with error below `10^{-12}`.
pub fn sup_ratio_exceeds<R: Rng + ?Sized>(rng: &mut R, x: f64) -> Result<bool> {
    if !(x > 1.0 && x.is_finite()) {
        return domain(format!("level must exceed 1, got {x}"));
    }
    let mut arrival: f64 = rng.sample(Exp1);
    let mut k = 0u64;
    loop {
        k += 1;
        let gap: f64 = rng.sample(Exp1);
        arrival += gap;
        if arrival > x * k as f64 {
            return Ok(true);
        }
        if k % 16 == 0 && crossing_bound(x, x * k as f64 - arrival) < 1e-12 {
            return Ok(false);
        }
    }
}

/// One draw of the limit law of `S_n(s)` under the boundary d.f. `F_s`.
///
/// `1/(s U^s)` for `s ≥ 1`; `(1/(1−s)) (sup_{t≥S₁} t/ℕ(t))^{−s}` for `s < 0`.
pub fn limit_sampler_prop43<R: Rng + ?Sized>(s: f64, rng: &mut R) -> Result<f64> {
    if s >= 1.0 {
        let u: f64 = 1.0 - rng.gen::<f64>();
        Ok(1.0 / (s * u.powf(s)))
    } else if s < 0.0 {
        Ok(sup_ratio_sampler(rng).powf(-s) / (1.0 - s))
    } else {
        domain(format!("no Poisson boundary limit law for 0 <= s < 1, got {s}"))
    }
}
