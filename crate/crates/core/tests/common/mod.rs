//! Independent reference implementations used by the integration and acceptance tests.
//!
//! Nothing here calls into the library's numerical code: kernels are evaluated
//! from the textbook formula, suprema by brute-force grids and integrals by
//! adaptive Simpson quadrature.

#![allow(dead_code)]

pub const S_GRID: [f64; 7] = [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

/// `φ_s(x)` straight from its definition, with the `s ∈ {0, 1}` limits.
pub fn phi(s: f64, x: f64) -> f64 {
    if s == 1.0 {
        if x == 0.0 {
            1.0
        } else {
            x * x.ln() - x + 1.0
        }
    } else if s == 0.0 {
        if x == 0.0 {
            f64::INFINITY
        } else {
            x - 1.0 - x.ln()
        }
    } else if x == 0.0 {
        if s > 0.0 {
            1.0 / s
        } else {
            f64::INFINITY
        }
    } else {
        (1.0 - s + s * x - x.powf(s)) / (s * (1.0 - s))
    }
}

/// `K_s(u, v) = v φ_s(u/v) + (1 − v) φ_s((1 − u)/(1 − v))` for `0 < v < 1`.
pub fn kernel(s: f64, u: f64, v: f64) -> f64 {
    v * phi(s, u / v) + (1.0 - v) * phi(s, (1.0 - u) / (1.0 - v))
}

pub fn kernel_plus(s: f64, u: f64, v: f64) -> f64 {
    if v < u {
        kernel(s, u, v)
    } else {
        0.0
    }
}

pub fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Left limit `𝔽_n(x−)`.
pub fn ecdf_left(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v < x) as f64 / sorted.len() as f64
}

/// Brute-force evaluation points for suprema of `x ↦ g(𝔽_n(x), x)`.
///
/// Holds the grid `{j·step}` with right-continuous ecdf levels, every sample
/// point, and every left limit `(X_(i), 𝔽_n(X_(i)−))`; a range query keeps
/// the points inside the range and left limits at its interior or open end.
pub struct DenseGrid {
    sorted: Vec<f64>,
    /// `(x, level, is_left_limit)`.
    points: Vec<(f64, f64, bool)>,
}

impl DenseGrid {
    pub fn new(sorted: &[f64], step: f64) -> Self {
        let count = (1.0 / step).round() as usize;
        let mut points = Vec::with_capacity(count + 2 * sorted.len());
        let mut k = 0;
        for j in 1..count {
            let x = j as f64 * step;
            while k < sorted.len() && sorted[k] <= x {
                k += 1;
            }
            points.push((x, k as f64 / sorted.len() as f64, false));
        }
        for &x in sorted {
            points.push((x, ecdf(sorted, x), false));
            points.push((x, ecdf_left(sorted, x), true));
        }
        DenseGrid { sorted: sorted.to_vec(), points }
    }

    /// Points of `[lo, hi)` (`hi_open`) or `[lo, hi]`, clipped to `(0, 1)`.
    pub fn range(&self, lo: f64, hi: f64, hi_open: bool) -> impl Iterator<Item = (f64, f64)> + '_ {
        let keep = move |&&(x, _, left): &&(f64, f64, bool)| {
            if left {
                x > lo && x <= hi
            } else {
                x >= lo && (x < hi || (!hi_open && x == hi))
            }
        };
        let end = (hi < 1.0 && hi > lo).then(|| {
            let level = if hi_open { ecdf_left(&self.sorted, hi) } else { ecdf(&self.sorted, hi) };
            (hi, level)
        });
        self.points.iter().filter(keep).map(|&(x, u, _)| (x, u)).chain(end).filter(|&(x, _)| x > 0.0 && x < 1.0)
    }

    /// `S_n(s)`: over `(0, 1)` for `s ≥ 1`, `[X_(1), X_(n))` otherwise.
    pub fn sn(&self, s: f64) -> f64 {
        let n = self.sorted.len();
        let (lo, hi) = if s >= 1.0 { (0.0, 1.0) } else { (self.sorted[0], self.sorted[n - 1]) };
        self.range(lo, hi, true).map(|(x, u)| kernel(s, u, x)).fold(0.0, f64::max)
    }

    /// `S_n⁺(s)` over `[X_(1), x_cap]`, or `[X_(1), min(x_cap, X_(n)))` for `s < 1`.
    pub fn sn_plus(&self, s: f64, x_cap: f64) -> f64 {
        let first = self.sorted[0];
        let last = self.sorted[self.sorted.len() - 1];
        if first > x_cap {
            return 0.0;
        }
        let (hi, open) = if s < 1.0 && last <= x_cap { (last, true) } else { (x_cap, false) };
        self.range(first, hi, open).map(|(x, u)| kernel_plus(s, u, x)).fold(0.0, f64::max)
    }

    /// Higher criticism over `[X_(1), X_(⌊α₀n⌋))`.
    pub fn hc(&self, alpha0: f64) -> f64 {
        let n = self.sorted.len();
        let k = (alpha0 * n as f64).floor() as usize;
        let root_n = (n as f64).sqrt();
        self.range(self.sorted[0], self.sorted[k - 1], true)
            .map(|(x, u)| root_n * (u - x) / (x * (1.0 - x)).sqrt())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn sn_grid(s: f64, sorted: &[f64], step: f64) -> f64 {
    DenseGrid::new(sorted, step).sn(s)
}

pub fn sn_plus_grid(s: f64, sorted: &[f64], x_cap: f64, step: f64) -> f64 {
    DenseGrid::new(sorted, step).sn_plus(s, x_cap)
}

pub fn hc_grid(sorted: &[f64], alpha0: f64, step: f64) -> f64 {
    DenseGrid::new(sorted, step).hc(alpha0)
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= 1e-14 * (left + right).abs() {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Quadrature `T_n(s)`: over `(0, 1)` for `s > 0`, `[X_(1), X_(n)]` otherwise,
/// integrating segment by segment.
pub fn tn_quadrature(s: f64, sorted: &[f64]) -> f64 {
    let mut cuts = vec![];
    if s > 0.0 {
        cuts.push(0.0);
    }
    cuts.extend_from_slice(sorted);
    if s > 0.0 {
        cuts.push(1.0);
    }
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let level = ecdf(sorted, a);
        let f = |x: f64| {
            if x <= 0.0 || x >= 1.0 {
                0.0
            } else {
                kernel(s, level, x)
            }
        };
        total += simpson(&f, a, b, 1e-14);
    }
    total
}

/// `P(a_i ≤ U_(i) ≤ b_i ∀i)` by nested integration over the ordered simplex.
///
/// `g_k(u) = ∫_{max(u, a_{k+1})}^{b_{k+1}} g_{k+1}(v) dv` is a piecewise polynomial
/// of degree `n − k` with kinks only at band ends, so Gauss–Legendre with
/// enough nodes on every piece between band ends is exact up to rounding.
pub fn simplex_probability(lower: &[f64], upper: &[f64]) -> f64 {
    let n = lower.len();
    let mut knots: Vec<f64> = lower.iter().chain(upper).copied().chain([0.0, 1.0]).collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    // 6-point Gauss–Legendre nodes and weights on [-1, 1]; exact to degree 11.
    const X: [f64; 6] = [
        -0.932_469_514_203_152_1,
        -0.661_209_386_466_264_5,
        -0.238_619_186_083_196_9,
        0.238_619_186_083_196_9,
        0.661_209_386_466_264_5,
        0.932_469_514_203_152_1,
    ];
    const W: [f64; 6] = [
        0.171_324_492_379_170_3,
        0.360_761_573_048_138_6,
        0.467_913_934_572_691_1,
        0.467_913_934_572_691_1,
        0.360_761_573_048_138_6,
        0.171_324_492_379_170_3,
    ];
    fn integrate(k: usize, from: f64, lower: &[f64], upper: &[f64], knots: &[f64]) -> f64 {
        // ∫ over u_k ∈ [max(from, a_k), b_k] of g_k(u_k).
        if k == lower.len() {
            return 1.0;
        }
        let (lo, hi) = (from.max(lower[k]), upper[k]);
        if hi <= lo {
            return 0.0;
        }
        let mut pieces = vec![lo];
        pieces.extend(knots.iter().copied().filter(|&t| t > lo && t < hi));
        pieces.push(hi);
        let mut total = 0.0;
        for w in pieces.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in X.iter().zip(W) {
                let u = mid + half * x;
                total += half * wt * integrate(k + 1, u, lower, upper, knots);
            }
        }
        total
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    factorial * integrate(0, 0.0, lower, upper, &knots)
}

/// Deterministic small-sample generator (SplitMix64) so oracle tests do not
/// depend on the library's own streams.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    pub fn sorted_sample(&mut self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| self.uniform()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
