//! Supremum and integral statistics of the empirical d.f. against the
//! uniform null.
//!
//! `K_s(u, ·)` is convex, so on every constancy interval of `𝔽_n` the
//! supremum is reached at one of the two interval ends (the right end as a
//! left limit). All suprema below are therefore finite maxima over segment
//! endpoints; integrals use closed-form antiderivatives segment by segment.

use serde::{Deserialize, Serialize};

use crate::divergence::{kdiv_log_v, kdiv_unchecked, DivergenceOrder, KernelValue};
use crate::error::{domain, Error, Result};
use crate::sample::{Sample, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatKind {
    /// `S_n(s)`.
    SupTwoSided,
    /// `S_n⁺(s)` on `[X_(1), x_cap]`.
    SupPlus,
    /// `S_n^{ur}(s)`.
    Unrestricted,
    /// `S_n^{ur,+}(s)`.
    UnrestrictedPlus,
    /// `S_n^{ur,-}(s)`.
    UnrestrictedMinus,
    /// `T_n(s)`.
    Integral,
    /// Higher criticism `HC_n^*`.
    HigherCriticism,
}

/// A computed statistic.
///
/// `statistic` is `+∞` when a boundary kernel diverges (possible only in
/// degenerate cases such as `n = 1` with `s ≤ 0`); higher criticism may be
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatValue {
    pub statistic: f64,
    /// Divergence order; `None` for higher criticism.
    pub s: Option<f64>,
    pub kind: StatKind,
    pub n: usize,
}

impl StatValue {
    fn new(value: KernelValue, order: DivergenceOrder, kind: StatKind, n: usize) -> Self {
        StatValue { statistic: value.to_f64(), s: Some(order.s()), kind, n }
    }

    pub fn is_finite(&self) -> bool {
        self.statistic.is_finite()
    }

    /// `n · statistic`.
    pub fn scaled(&self) -> f64 {
        self.n as f64 * self.statistic
    }
}

const ZERO: KernelValue = KernelValue::Finite(0.0);

#[inline]
fn at(order: DivergenceOrder, level: f64, x: f64) -> KernelValue {
    if x <= 0.0 || x >= 1.0 {
        // K_s(0, 0+) = K_s(1, 1-) = 0; no other level meets these ends.
        ZERO
    } else {
        kdiv_unchecked(order, level, x)
    }
}

#[inline]
fn segment_sup(order: DivergenceOrder, seg: &Segment) -> KernelValue {
    at(order, seg.level, seg.left).max(at(order, seg.level, seg.right))
}

/// Segments inside `[X_(1), X_(n))`.
fn inner_segments(sample: &Sample) -> impl Iterator<Item = Segment> + '_ {
    let last = sample.order_stat(sample.n());
    sample.segments().skip(1).take_while(move |seg| seg.left < last)
}

/// `S_n(s)`: supremum over `(0, 1)` for `s ≥ 1`, over `[X_(1), X_(n))` for `s < 1`.
///
/// When the restricted range is empty (`n = 1`, or all observations tied)
/// the statistic is the single evaluation `K_s(𝔽_n(X_(1)), X_(1))`.
pub fn sn(order: DivergenceOrder, sample: &Sample) -> StatValue {
    let value = if order.s() >= 1.0 {
        sample.segments().map(|seg| segment_sup(order, &seg)).fold(ZERO, KernelValue::max)
    } else {
        let mut inner = inner_segments(sample).peekable();
        if inner.peek().is_none() {
            let x = sample.order_stat(1);
            kdiv_unchecked(order, sample.ecdf(x), x)
        } else {
            inner.map(|seg| segment_sup(order, &seg)).fold(ZERO, KernelValue::max)
        }
    };
    StatValue::new(value, order, StatKind::SupTwoSided, sample.n())
}

/// `S_n(s)` from the sorted logarithms `ln X_(1) ≤ … ≤ ln X_(n)`.
///
/// Same value as [`sn`], for samples whose smallest values underflow in linear
/// scale (heavy left tails such as `(1 + log(1/x))^{-1}`).
pub fn sn_log(order: DivergenceOrder, ln_sorted: &[f64]) -> Result<StatValue> {
    let n = ln_sorted.len();
    if n == 0 {
        return Err(Error::InvalidSample("sample is empty".into()));
    }
    if ln_sorted.iter().any(|v| v.is_nan() || *v > 0.0) || ln_sorted.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSample("log values must be sorted and lie in [-inf, 0]".into()));
    }
    // Distinct values with the ecdf level just right of each.
    let mut cuts: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in ln_sorted.iter().enumerate() {
        let level = (i + 1) as f64 / n as f64;
        match cuts.last_mut() {
            Some(last) if last.0 == v => last.1 = level,
            _ => cuts.push((v, level)),
        }
    }
    let at = |level: f64, ln_x: f64| {
        if ln_x == f64::NEG_INFINITY || ln_x >= 0.0 {
            ZERO
        } else {
            kdiv_log_v(order, level, ln_x)
        }
    };
    let m = cuts.len();
    let right_of = |k: usize| if k + 1 < m { cuts[k + 1].0 } else { 0.0 };
    let value = if order.s() >= 1.0 {
        let first = at(0.0, cuts[0].0);
        (0..m).map(|k| at(cuts[k].1, cuts[k].0).max(at(cuts[k].1, right_of(k)))).fold(first, KernelValue::max)
    } else if m == 1 {
        kdiv_log_v(order, cuts[0].1, cuts[0].0)
    } else {
        (0..m - 1).map(|k| at(cuts[k].1, cuts[k].0).max(at(cuts[k].1, right_of(k)))).fold(ZERO, KernelValue::max)
    };
    Ok(StatValue::new(value, order, StatKind::SupTwoSided, n))
}

/// `S_n⁺(s) = sup_{X_(1) ≤ x ≤ x_cap} K_s⁺(𝔽_n(x), x)`.
///
/// Zero when `X_(1) > x_cap`. For `s < 1` the segment starting at `X_(n)`
/// (where `𝔽_n = 1`) is excluded, as in the restricted two-sided statistic.
pub fn sn_plus(order: DivergenceOrder, sample: &Sample, x_cap: f64) -> Result<StatValue> {
    if !(x_cap > 0.0 && x_cap <= 1.0) {
        return domain(format!("x_cap must lie in (0, 1], got {x_cap}"));
    }
    let n = sample.n();
    let last = sample.order_stat(n);
    let restricted = order.s() < 1.0;
    let plus = |level: f64, x: f64| if x < level { at(order, level, x) } else { ZERO };
    let mut best = ZERO;
    for seg in sample.segments().skip(1) {
        if seg.left > x_cap || (restricted && seg.left >= last) {
            break;
        }
        let right = seg.right.min(x_cap);
        best = best.max(plus(seg.level, seg.left)).max(plus(seg.level, right));
    }
    Ok(StatValue::new(best, order, StatKind::SupPlus, n))
}

fn check_open_unit(order: DivergenceOrder) -> Result<()> {
    if !(order.s() > 0.0 && order.s() < 1.0) {
        return domain(format!("unrestricted statistics require 0 < s < 1, got {}", order.s()));
    }
    Ok(())
}

/// `S_n^{ur}(s) = sup_{0<x<1} K_s(𝔽_n(x), x)` for `0 < s < 1`.
pub fn sn_unrestricted(order: DivergenceOrder, sample: &Sample) -> Result<StatValue> {
    check_open_unit(order)?;
    let value = sample.segments().map(|seg| segment_sup(order, &seg)).fold(ZERO, KernelValue::max);
    Ok(StatValue::new(value, order, StatKind::Unrestricted, sample.n()))
}

/// `S_n^{ur,+}(s) = max_i K_s⁺(𝔽_n(X_(i)), X_(i))` for `0 < s < 1`.
pub fn sn_ur_plus(order: DivergenceOrder, sample: &Sample) -> Result<StatValue> {
    check_open_unit(order)?;
    let value = sample
        .segments()
        .skip(1)
        .map(|seg| if seg.left < seg.level { at(order, seg.level, seg.left) } else { ZERO })
        .fold(ZERO, KernelValue::max);
    Ok(StatValue::new(value, order, StatKind::UnrestrictedPlus, sample.n()))
}

/// `S_n^{ur,-}(s) = sup_{0<x<1} K_s⁻(𝔽_n(x), x)` for `0 < s < 1`.
pub fn sn_ur_minus(order: DivergenceOrder, sample: &Sample) -> Result<StatValue> {
    check_open_unit(order)?;
    let minus = |level: f64, x: f64| if level < x { at(order, level, x) } else { ZERO };
    let value = sample
        .segments()
        .map(|seg| minus(seg.level, seg.left).max(minus(seg.level, seg.right)))
        .fold(ZERO, KernelValue::max);
    Ok(StatValue::new(value, order, StatKind::UnrestrictedMinus, sample.n()))
}

/// Higher criticism `sup_{X_(1) ≤ x < X_(⌊α₀n⌋)} √n (𝔽_n(x) − x)/√(x(1−x))`.
pub fn hc_star(sample: &Sample, alpha0: f64) -> Result<StatValue> {
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return domain(format!("alpha0 must lie in (0, 1], got {alpha0}"));
    }
    let n = sample.n();
    let k_end = (alpha0 * n as f64).floor() as usize;
    if k_end < 1 {
        return Err(Error::SizeOutOfRange { n, reason: format!("floor(alpha0 n) = 0 for alpha0 = {alpha0}") });
    }
    let end = sample.order_stat(k_end);
    let root_n = (n as f64).sqrt();
    let z = |level: f64, x: f64| root_n * (level - x) / (x * (1.0 - x)).sqrt();
    let mut best: Option<f64> = None;
    for seg in sample.segments().skip(1).take_while(|seg| seg.left < end) {
        // The standardized difference decreases in x, so the left end dominates.
        let v = z(seg.level, seg.left).max(z(seg.level, seg.right.min(end)));
        best = Some(best.map_or(v, |b| b.max(v)));
    }
    let statistic = best.ok_or_else(|| Error::SizeOutOfRange {
        n,
        reason: "empty range X_(1) <= x < X_(floor(alpha0 n))".into(),
    })?;
    Ok(StatValue { statistic, s: None, kind: StatKind::HigherCriticism, n })
}

/// `T_n(s)`: integral over `(0, 1)` for `s > 0`, over `[X_(1), X_(n)]` for `s ≤ 0`.
pub fn tn(order: DivergenceOrder, sample: &Sample) -> Result<StatValue> {
    let n = sample.n();
    let mut total = 0.0;
    if order.s() > 0.0 {
        for seg in sample.segments() {
            total += segment_integral(order, seg.level, seg.left, seg.right);
        }
    } else {
        if n < 2 {
            return Err(Error::SizeOutOfRange { n, reason: "T_n(s) with s <= 0 needs n >= 2".into() });
        }
        for seg in inner_segments(sample) {
            total += segment_integral(order, seg.level, seg.left, seg.right);
        }
    }
    if !total.is_finite() {
        return Err(Error::Numeric(format!("non-finite integral for s = {}", order.s())));
    }
    Ok(StatValue { statistic: total.max(0.0), s: Some(order.s()), kind: StatKind::Integral, n })
}

/// `∫_lo^hi x^{p-1} dx` for `0 ≤ lo < hi`.
fn power_integral(lo: f64, hi: f64, p: f64) -> f64 {
    if lo == 0.0 {
        return if p > 0.0 { hi.powf(p) / p } else { f64::INFINITY };
    }
    let log_ratio = ((hi - lo) / lo).ln_1p();
    if p == 0.0 {
        log_ratio
    } else {
        lo.powf(p) * (p * log_ratio).exp_m1() / p
    }
}

#[inline]
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `∫_l^r K_s(c, x) dx` for `0 ≤ l < r ≤ 1`, `c ∈ [0, 1]`, by closed-form antiderivatives.
pub(crate) fn segment_integral(order: DivergenceOrder, c: f64, l: f64, r: f64) -> f64 {
    if r <= l {
        return 0.0;
    }
    let width = r - l;
    let d = 1.0 - c;
    let s = order.s();
    if s == 2.0 {
        let left = if c > 0.0 { c * c * ((r - l) / l).ln_1p() } else { 0.0 };
        let right = if d > 0.0 { d * d * ((r - l) / (1.0 - r)).ln_1p() } else { 0.0 };
        return 0.5 * (left + right - width);
    }
    match order.pole() {
        Some(0) => {
            // x ln x + (1-x) ln(1-x) - x ln c - (1-x) ln(1-c)
            let a = |x: f64| 0.5 * x * x * x.ln() - 0.25 * x * x;
            let a = |x: f64| if x == 0.0 { 0.0 } else { a(x) };
            let ones = |x: f64| {
                let y = 1.0 - x;
                if y == 0.0 {
                    0.0
                } else {
                    -(0.5 * y * y * y.ln() - 0.25 * y * y)
                }
            };
            let lin = 0.5 * (r * r - l * l);
            let lin_c = 0.5 * ((1.0 - l) * (1.0 - l) - (1.0 - r) * (1.0 - r));
            (a(r) - a(l)) + (ones(r) - ones(l)) - c.ln() * lin - d.ln() * lin_c
        }
        Some(1) => {
            let ent = |x: f64| xlogx(x) - x;
            let ent_c = |x: f64| -xlogx(1.0 - x) - x;
            width * (xlogx(c) + xlogx(d))
                - if c > 0.0 { c * (ent(r) - ent(l)) } else { 0.0 }
                - if d > 0.0 { d * (ent_c(r) - ent_c(l)) } else { 0.0 }
        }
        _ => {
            let p = 2.0 - s;
            let left = if c > 0.0 { c.powf(s) * power_integral(l, r, p) } else { 0.0 };
            let right = if d > 0.0 { d.powf(s) * power_integral(1.0 - r, 1.0 - l, p) } else { 0.0 };
            (width - left - right) / (s * (1.0 - s))
        }
    }
}
