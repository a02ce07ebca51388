//! The power-divergence family `φ_s` and the Bernoulli divergence
//! `K_s(u, v) = v φ_s(u/v) + (1 - v) φ_s((1 - u)/(1 - v))`.
//!
//! Evaluation is organised around the per-cell term `w φ_s(a / w)`:
//!
//! * near `a = w` a power series in `t = a/w - 1` is used; its
//!   coefficients `c_2 = 1/2, c_{k+1} = c_k (s - k)/(k + 1)` carry no
//!   `1/(s(1-s))` factor, so the series is stable for every `s`;
//! * away from `a = w` the generic branch is rewritten with `expm1` so that
//!   the `0/0` at `s → 0` and `s → 1` cancels analytically;
//! * `s ∈ {0, 1, 2}` (and `s` within the switch width of 0 or 1) use the
//!   closed logarithmic / quadratic forms.
//!
//! Boundary cells with `a = 0` take the algebraic limit of the formula:
//! `φ_s(0) = 1/s` for `s > 0`, `+∞` for `s ≤ 0`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Result};

/// Default width of the neighbourhood of `s = 0` and `s = 1` in which the
/// logarithmic limit branches are used.
pub const DEFAULT_SWITCH_WIDTH: f64 = 1e-8;

/// Default absolute tolerance of the kernel inversions.
pub const DEFAULT_TOL: f64 = 1e-12;

const SERIES_RADIUS: f64 = 0.1;

/// The real index `s` of the divergence family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceOrder {
    s: f64,
    switch_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// s = 0: reversed Kullback-Leibler.
    Reversed,
    /// s = 1: Kullback-Leibler.
    KullbackLeibler,
    /// s = 2: Pearson chi-square.
    Pearson,
    Power(f64),
}

impl DivergenceOrder {
    pub fn new(s: f64) -> Result<Self> {
        Self::with_switch_width(s, DEFAULT_SWITCH_WIDTH)
    }

    pub fn with_switch_width(s: f64, switch_width: f64) -> Result<Self> {
        if !s.is_finite() {
            return domain(format!("divergence order must be finite, got {s}"));
        }
        if !(switch_width >= 0.0 && switch_width < 0.25) {
            return domain(format!("switch width must lie in [0, 0.25), got {switch_width}"));
        }
        Ok(DivergenceOrder { s, switch_width })
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    /// The order `1 - s`, which swaps the roles of the two arguments.
    pub fn dual(&self) -> Self {
        DivergenceOrder { s: 1.0 - self.s, switch_width: self.switch_width }
    }

    fn branch(&self) -> Branch {
        let s = self.s;
        if s.abs() < self.switch_width || s == 0.0 {
            Branch::Reversed
        } else if (s - 1.0).abs() < self.switch_width || s == 1.0 {
            Branch::KullbackLeibler
        } else if s == 2.0 {
            Branch::Pearson
        } else {
            Branch::Power(s)
        }
    }

    /// `Some(0)` or `Some(1)` when the logarithmic limit branch applies.
    pub(crate) fn pole(&self) -> Option<u8> {
        match self.branch() {
            Branch::Reversed => Some(0),
            Branch::KullbackLeibler => Some(1),
            _ => None,
        }
    }

    /// Effective `s` used by the evaluation (snapped onto 0 or 1 inside the switch width).
    fn effective(&self) -> f64 {
        match self.branch() {
            Branch::Reversed => 0.0,
            Branch::KullbackLeibler => 1.0,
            Branch::Pearson => 2.0,
            Branch::Power(s) => s,
        }
    }
}

impl fmt::Display for DivergenceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.s)
    }
}

/// A value in `[0, +∞]` with an explicit infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelValue {
    Finite(f64),
    Infinite,
}

impl KernelValue {
    #[inline]
    pub fn is_finite(&self) -> bool {
        matches!(self, KernelValue::Finite(_))
    }

    /// The finite value, if any.
    #[inline]
    pub fn finite(&self) -> Option<f64> {
        match *self {
            KernelValue::Finite(x) => Some(x),
            KernelValue::Infinite => None,
        }
    }

    /// Lossy conversion for reporting; `Infinite` maps to `f64::INFINITY`.
    #[inline]
    pub fn to_f64(&self) -> f64 {
        match *self {
            KernelValue::Finite(x) => x,
            KernelValue::Infinite => f64::INFINITY,
        }
    }

    /// `self ≤ bound` for a finite bound.
    #[inline]
    pub fn le(&self, bound: f64) -> bool {
        match *self {
            KernelValue::Finite(x) => x <= bound,
            KernelValue::Infinite => false,
        }
    }

    fn add(self, other: KernelValue) -> KernelValue {
        match (self, other) {
            (KernelValue::Finite(a), KernelValue::Finite(b)) => KernelValue::Finite(a + b),
            _ => KernelValue::Infinite,
        }
    }

    pub fn max(self, other: KernelValue) -> KernelValue {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for KernelValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (KernelValue::Finite(a), KernelValue::Finite(b)) => a.partial_cmp(b),
            (KernelValue::Finite(_), KernelValue::Infinite) => Some(Ordering::Less),
            (KernelValue::Infinite, KernelValue::Finite(_)) => Some(Ordering::Greater),
            (KernelValue::Infinite, KernelValue::Infinite) => Some(Ordering::Equal),
        }
    }
}

/// `φ_s(x)` for `x ≥ 0`.
pub fn phi(order: DivergenceOrder, x: f64) -> Result<KernelValue> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("phi requires a finite x >= 0, got {x}"));
    }
    // w φ(a/w) with w = 1.
    Ok(cell_term(order, x, 1.0))
}

/// Series for `φ_s(1 + t)`, valid for `|t| < 1`.
fn phi_series(s: f64, t: f64) -> f64 {
    let mut coef = 0.5;
    let mut power = t * t;
    let mut sum = coef * power;
    for k in 2..200 {
        coef *= (s - k as f64) / (k as f64 + 1.0);
        power *= t;
        let term = coef * power;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `w φ_s(a/w)` for `a ≥ 0`, `w > 0`.
fn cell_term(order: DivergenceOrder, a: f64, w: f64) -> KernelValue {
    let branch = order.branch();
    if a == 0.0 {
        return match branch {
            Branch::Reversed => KernelValue::Infinite,
            Branch::KullbackLeibler => KernelValue::Finite(w),
            Branch::Pearson => KernelValue::Finite(0.5 * w),
            Branch::Power(s) if s > 0.0 => KernelValue::Finite(w / s),
            Branch::Power(_) => KernelValue::Infinite,
        };
    }
    let t = (a - w) / w;
    if t.abs() < SERIES_RADIUS {
        return KernelValue::Finite(w * phi_series(order.effective(), t));
    }
    let value = match branch {
        Branch::Pearson => 0.5 * (a - w) * (a - w) / w,
        Branch::KullbackLeibler => a * (a.ln() - w.ln()) - a + w,
        Branch::Reversed => w * (w.ln() - a.ln()) + a - w,
        Branch::Power(s) => {
            let log_ratio = a.ln() - w.ln();
            let r = 1.0 - s;
            if s.abs() <= r.abs() && (s * log_ratio).abs() < 1.0 {
                // w [s (x - 1) - (x^s - 1)] / (s (1 - s)), x = a/w
                w * (s * t - (s * log_ratio).exp_m1()) / (s * r)
            } else if s.abs() > r.abs() && (r * log_ratio).abs() < 1.0 {
                // a [r (1/x - 1) - (x^{-r} - 1)] / (s r)
                a * (r * (w - a) / a - (-r * log_ratio).exp_m1()) / (s * r)
            } else {
                let cross = (s * a.ln() + r * w.ln()).exp();
                (w * r + s * a - cross) / (s * r)
            }
        }
    };
    if value.is_finite() {
        KernelValue::Finite(value.max(0.0))
    } else {
        KernelValue::Infinite
    }
}

fn check_args(u: f64, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return domain(format!("first argument must lie in [0, 1], got {u}"));
    }
    if !(v > 0.0 && v < 1.0) {
        return domain(format!("second argument must lie in (0, 1), got {v}"));
    }
    Ok(())
}

#[inline]
pub(crate) fn kdiv_unchecked(order: DivergenceOrder, u: f64, v: f64) -> KernelValue {
    cell_term(order, u, v).add(cell_term(order, 1.0 - u, 1.0 - v))
}

/// Below this log-level a probability is treated as not representable in linear scale.
pub(crate) const LOG_TINY: f64 = -700.0;

/// `K_s(u, v)` with `v = exp(ln_v)`, accurate when `v` underflows.
///
/// For `v < e^{-700}` the second cell is `φ_s(1 - u)` to full precision and
/// the first cell `v φ_s(u/v)` is evaluated from `ln v` directly.
pub fn kdiv_log_v(order: DivergenceOrder, u: f64, ln_v: f64) -> KernelValue {
    if ln_v > LOG_TINY {
        return kdiv_unchecked(order, u, ln_v.exp());
    }
    let tail = cell_term(order, 1.0 - u, 1.0);
    if u == 0.0 {
        return cell_term(order, 0.0, ln_v.exp().max(f64::MIN_POSITIVE)).add(tail);
    }
    let a = u;
    let head = match order.branch() {
        Branch::KullbackLeibler => a * (a.ln() - ln_v) - a,
        Branch::Reversed => a,
        Branch::Pearson => 0.5 * (2.0 * a.ln() - ln_v).exp(),
        Branch::Power(s) => {
            let r = 1.0 - s;
            let z = r * (ln_v - a.ln());
            if z > 30.0 && s * r < 0.0 {
                // expm1(z) dominates and a e^z may overflow on its own.
                (a.ln() + z - (-s * r).ln()).exp()
            } else {
                a * (-r - z.exp_m1()) / (s * r)
            }
        }
    };
    if head.is_finite() {
        KernelValue::Finite(head.max(0.0)).add(tail)
    } else {
        KernelValue::Infinite
    }
}

/// `K_s(u, v)` with `u = exp(ln_u)`, via `K_s(u, v) = K_{1-s}(v, u)`.
pub fn kdiv_log_u(order: DivergenceOrder, ln_u: f64, v: f64) -> KernelValue {
    kdiv_log_v(order.dual(), v, ln_u)
}

/// `K_s(u, v)` for `u ∈ [0, 1]`, `v ∈ (0, 1)`.
pub fn kdiv(order: DivergenceOrder, u: f64, v: f64) -> Result<KernelValue> {
    check_args(u, v)?;
    Ok(kdiv_unchecked(order, u, v))
}

/// One-sided kernel: `K_s(u, v)` when `v < u`, zero otherwise.
pub fn kdiv_plus(order: DivergenceOrder, u: f64, v: f64) -> Result<KernelValue> {
    check_args(u, v)?;
    Ok(if v < u { kdiv_unchecked(order, u, v) } else { KernelValue::Finite(0.0) })
}

/// One-sided kernel: `K_s(u, v)` when `u < v`, zero otherwise.
pub fn kdiv_minus(order: DivergenceOrder, u: f64, v: f64) -> Result<KernelValue> {
    check_args(u, v)?;
    Ok(if u < v { kdiv_unchecked(order, u, v) } else { KernelValue::Finite(0.0) })
}

/// Limit of `K_s(u, v)` as `v ↓ 0`, for `u ∈ (0, 1)`.
fn limit_v_at_zero(order: DivergenceOrder, u: f64) -> KernelValue {
    // K_s(u, v) = K_{1-s}(v, u); v = 0 is the zero-cell convention of the dual order.
    kdiv_unchecked(order.dual(), 0.0, u)
}

/// Locates `inf { x ∈ [0, c] : f(x) ≤ λ }` for `f` nonincreasing on `(0, c]`
/// with `f(c) = 0`, given the limit `f(0+)`.
fn lower_crossing<F>(f: F, c: f64, at_zero: KernelValue, lambda: f64, tol: f64) -> f64
where
    F: Fn(f64) -> KernelValue,
{
    if c <= 0.0 || at_zero.le(lambda) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, c);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).le(lambda) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 {
        return domain(format!("level must be nonnegative, got {lambda}"));
    }
    Ok(())
}

/// `{ v ∈ (0, 1) : K_s(u, v) ≤ λ }` as a closed interval `(v_lo, v_hi)`.
///
/// Endpoints are located by bisection to absolute tolerance `tol`; an
/// endpoint saturates to 0 or 1 when the bound holds all the way to that side.
pub fn invert_in_v_tol(order: DivergenceOrder, u: f64, lambda: f64, tol: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&u) {
        return domain(format!("first argument must lie in [0, 1], got {u}"));
    }
    check_lambda(lambda)?;
    if lambda.is_infinite() {
        return Ok((0.0, 1.0));
    }
    let lower = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let at_zero = if u >= 1.0 { KernelValue::Infinite } else { limit_v_at_zero(order, u) };
        lower_crossing(|v| kdiv_unchecked(order, u, v), u, at_zero, lambda, tol)
    };
    let lo = lower(u);
    let hi = 1.0 - lower(1.0 - u);
    Ok((lo, hi))
}

pub fn invert_in_v(order: DivergenceOrder, u: f64, lambda: f64) -> Result<(f64, f64)> {
    invert_in_v_tol(order, u, lambda, DEFAULT_TOL)
}

/// `{ u ∈ [0, 1] : K_s(u, v) ≤ λ }` as a closed interval `(u_lo, u_hi)`.
pub fn invert_in_u_tol(order: DivergenceOrder, v: f64, lambda: f64, tol: f64) -> Result<(f64, f64)> {
    if !(v > 0.0 && v < 1.0) {
        return domain(format!("second argument must lie in (0, 1), got {v}"));
    }
    check_lambda(lambda)?;
    if lambda.is_infinite() {
        return Ok((0.0, 1.0));
    }
    let lower = |v: f64| {
        let at_zero = kdiv_unchecked(order, 0.0, v);
        lower_crossing(|u| kdiv_unchecked(order, u, v), v, at_zero, lambda, tol)
    };
    let lo = lower(v);
    let hi = 1.0 - lower(1.0 - v);
    Ok((lo, hi))
}

pub fn invert_in_u(order: DivergenceOrder, v: f64, lambda: f64) -> Result<(f64, f64)> {
    invert_in_u_tol(order, v, lambda, DEFAULT_TOL)
}

/// `τ_s⁺(x, a) = inf { t : K_s⁺(t, x) ≥ a }`, taken as `x` at `a = 0` and
/// saturating at 1 once `a ≥ K_s(1, x)`.
pub fn tau_plus(order: DivergenceOrder, x: f64, a: f64) -> Result<f64> {
    if a == 0.0 {
        if !(x > 0.0 && x < 1.0) {
            return domain(format!("x must lie in (0, 1), got {x}"));
        }
        return Ok(x);
    }
    Ok(invert_in_u(order, x, a)?.1)
}

/// `τ_s⁻(x, a) = sup { t : K_s⁻(t, x) ≥ a }`, the mirror image of [`tau_plus`].
pub fn tau_minus(order: DivergenceOrder, x: f64, a: f64) -> Result<f64> {
    if a == 0.0 {
        if !(x > 0.0 && x < 1.0) {
            return domain(format!("x must lie in (0, 1), got {x}"));
        }
        return Ok(x);
    }
    Ok(invert_in_u(order, x, a)?.0)
}
