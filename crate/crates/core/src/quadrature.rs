//! Gauss–Legendre quadrature and dyadic endpoint refinement.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-type initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // p = P_n(x), q = P_{n-1}(x)
            let (mut p, mut q) = (1.0, 0.0);
            for k in 1..=n {
                let kf = k as f64;
                let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * q) / kf;
                q = p;
                p = next;
            }
            dp = n as f64 * (x * p - q) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// 32-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn gl32<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule32();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * nodes.iter().zip(weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Adaptive bisection on the 32-point rule until halves agree to `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (gl32(f, a, m), gl32(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= tol || m <= a || m >= b {
            return l + r;
        }
        rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, gl32(f, a, b), tol, 40)
}

/// Result of an improper integral over `(0, 1)` with endpoint singularities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailedIntegral {
    /// Sum of all evaluated pieces plus the extrapolated tails.
    pub value: f64,
    /// Extrapolated contribution of the unevaluated tails.
    pub tail: f64,
    /// Set when the dyadic pieces do not decay geometrically (divergent, or
    /// convergent too slowly to certify), or the sum overflows.
    pub diverges: bool,
}

/// `∫_0^1 f` with dyadic refinement `[2^{-k-1}, 2^{-k}]` toward both endpoints.
///
/// `f` receives `(x, 1 - x)` so that it can work with the small side exactly.
/// The last pieces on each side estimate a geometric ratio; a ratio that is
/// not safely below one, or a tail estimate above `rel_tol` of the total, flags
/// divergence.
pub fn dyadic_unit<F: Fn(f64, f64) -> f64>(f: F, rel_tol: f64) -> TailedIntegral {
    const LEVELS: i32 = 990;
    let middle = gl32(|x| f(x, 1.0 - x), 0.25, 0.75);
    let mut total = middle;
    let mut tail = 0.0;
    let mut diverges = !middle.is_finite();
    for side in [false, true] {
        let mut last = [0.0_f64; 2];
        for k in 2..LEVELS {
            let (lo, hi) = (2f64.powi(-k - 1), 2f64.powi(-k));
            let piece = if side { gl32(|t| f(1.0 - t, t), lo, hi) } else { gl32(|t| f(t, 1.0 - t), lo, hi) };
            if !piece.is_finite() {
                diverges = true;
                break;
            }
            total += piece;
            last = [last[1], piece];
        }
        let ratio = if last[0] > 0.0 { last[1] / last[0] } else { 0.0 };
        let side_tail = if ratio < 1.0 { last[1] * ratio / (1.0 - ratio) } else { f64::INFINITY };
        tail += side_tail;
    }
    if !total.is_finite() || tail > rel_tol * total.abs().max(1e-300) {
        diverges = true;
    }
    TailedIntegral { value: if diverges { f64::INFINITY } else { total + tail }, tail, diverges }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-14);
        assert!((gl32(|x| x.exp(), 0.0, 1.0) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = adaptive(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!((v - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn dyadic_singular_integrals() {
        // ∫ (x(1-x))^{-1/2} = π.
        let r = dyadic_unit(|x, y| (x * y).powf(-0.5), 1e-10);
        assert!(!r.diverges);
        assert!((r.value - std::f64::consts::PI).abs() < 1e-9);
        // ∫ 1/x diverges logarithmically.
        assert!(dyadic_unit(|x, _| 1.0 / x, 1e-10).diverges);
        // ∫ 1/(x log²(e/x)) = 1 converges, but only like 1/k per dyadic piece.
        let slow = dyadic_unit(|x, _| 1.0 / (x * (1.0 - x.ln()).powi(2)), 1e-10);
        assert!(slow.diverges);
    }
}
