//! Large-sample null laws.
//!
//! * `n S_n(s) − r_n` converges to the double-exponential law
//!   `P(Y ≤ x) = exp(−4 e^{−x})` for `−1 ≤ s ≤ 2`.
//! * `n T_n(s)` converges to `A²/2`, with `A² = Σ_j Z_j² / (j(j+1))`.
//!
//! All iterated logarithms are natural: `log₂ n = ln ln n`, `log₃ n = ln ln ln n`.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::stream_rng;
use crate::statistics::{StatKind, StatValue};

/// Smallest `n` for which centering constants are offered.
pub const MIN_N: usize = 16;

/// Default truncation of the `A²` series.
pub const DEFAULT_TRUNCATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringConstants {
    pub n: f64,
    pub r_n: f64,
    pub b_n: f64,
    pub c_n: f64,
}

/// Centering constants for a real-valued `n > e`.
pub fn centering_real(n: f64) -> Result<CenteringConstants> {
    if !(n > std::f64::consts::E) {
        return domain(format!("centering requires n > e, got {n}"));
    }
    if n < MIN_N as f64 {
        log::warn!("centering constants at n = {n} < {MIN_N} are numerically meaningless");
    }
    let log2 = n.ln().ln();
    let log3 = log2.ln();
    let half_log_4pi = 0.5 * (4.0 * std::f64::consts::PI).ln();
    Ok(CenteringConstants {
        n,
        r_n: log2 + 0.5 * log3 - half_log_4pi,
        b_n: (2.0 * log2).sqrt(),
        c_n: 2.0 * log2 + 0.5 * log3 - half_log_4pi,
    })
}

pub fn centering(n: usize) -> Result<CenteringConstants> {
    if n < MIN_N {
        return Err(Error::SizeOutOfRange { n, reason: format!("asymptotic centering needs n >= {MIN_N}") });
    }
    centering_real(n as f64)
}

/// `exp(−4 exp(−x))`.
pub fn ev4_cdf(x: f64) -> f64 {
    (-4.0 * (-x).exp()).exp()
}

/// `1 − exp(−4 exp(−x))` without cancellation.
pub fn ev4_sf(x: f64) -> f64 {
    -(-4.0 * (-x).exp()).exp_m1()
}

pub fn ev4_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("probability must lie in (0, 1), got {p}"));
    }
    Ok(-(-p.ln() / 4.0).ln())
}

fn check_order_range(s: f64) -> Result<()> {
    if !(-1.0..=2.0).contains(&s) {
        return domain(format!("no asymptotic null law is available for s = {s} outside [-1, 2]"));
    }
    Ok(())
}

/// Asymptotic p-value of a two-sided supremum statistic.
pub fn pvalue_asymptotic(stat: &StatValue) -> Result<f64> {
    if stat.kind != StatKind::SupTwoSided {
        return domain("the double-exponential law applies to the two-sided supremum statistic");
    }
    let s = stat.s.ok_or_else(|| Error::Domain("statistic carries no order".into()))?;
    check_order_range(s)?;
    let c = centering(stat.n)?;
    if !stat.statistic.is_finite() {
        return Ok(0.0);
    }
    Ok(ev4_sf(stat.n as f64 * stat.statistic - c.r_n))
}

/// `(r_n + E_v⁴⁻¹(1 − α)) / n`.
pub fn quantile_asymptotic(n: usize, s: f64, alpha: f64) -> Result<f64> {
    check_order_range(s)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let c = centering(n)?;
    Ok((c.r_n + ev4_quantile(1.0 - alpha)?) / n as f64)
}

/// One draw of the truncated series `Σ_{j≤J} Z_j²/(j(j+1)) + 1/(J+1)`.
///
/// The constant `1/(J+1)` is the mean of the omitted tail.
pub fn ad_limit_sampler<R: Rng + ?Sized>(rng: &mut R, truncation: usize) -> f64 {
    let mut sum = 0.0;
    for j in 1..=truncation {
        let z: f64 = rng.sample(StandardNormal);
        let jf = j as f64;
        sum += z * z / (jf * (jf + 1.0));
    }
    sum + 1.0 / (truncation as f64 + 1.0)
}

/// Sorted draws of `A²/2` used as the null law of `n T_n(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdDrawCache {
    pub seed: u64,
    pub truncation: usize,
    draws: Vec<f64>,
}

const CACHE_MAGIC: &[u8; 8] = b"PHIDA2v1";

impl AdDrawCache {
    /// Generates `size` draws; draw `i` uses stream `i` of `seed`.
    pub fn generate(seed: u64, truncation: usize, size: usize) -> Result<Self> {
        if truncation == 0 || size == 0 {
            return domain("truncation and cache size must be positive");
        }
        let mut draws: Vec<f64> = (0..size as u64)
            .into_par_iter()
            .map(|i| 0.5 * ad_limit_sampler(&mut stream_rng(seed, i), truncation))
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
        Ok(AdDrawCache { seed, truncation, draws })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    /// `(P̂(A²/2 ≥ x), standard error)`.
    pub fn upper_tail(&self, x: f64) -> (f64, f64) {
        let m = self.draws.len() as f64;
        let below = self.draws.partition_point(|&d| d < x) as f64;
        let p = (m - below) / m;
        (p, (p * (1.0 - p) / m).sqrt())
    }

    pub fn median(&self) -> f64 {
        self.draws[self.draws.len() / 2]
    }

    /// Binary layout: magic, seed, truncation, count (little-endian u64), then f64 draws.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&self.seed.to_le_bytes())?;
        out.write_all(&(self.truncation as u64).to_le_bytes())?;
        out.write_all(&(self.draws.len() as u64).to_le_bytes())?;
        for d in &self.draws {
            out.write_all(&d.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 32 || &bytes[..8] != CACHE_MAGIC {
            return Err(Error::Parse(format!("{} is not an A2 draw cache", path.display())));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        let (seed, truncation, count) = (word(1), word(2) as usize, word(3) as usize);
        if bytes.len() != 32 + 8 * count {
            return Err(Error::Parse("truncated A2 draw cache".into()));
        }
        let draws = (0..count).map(|i| f64::from_bits(word(4 + i))).collect();
        Ok(AdDrawCache { seed, truncation, draws })
    }

    /// Loads `path` when it matches `(seed, truncation, size)`, else regenerates and saves.
    pub fn load_or_generate(path: &Path, seed: u64, truncation: usize, size: usize) -> Result<Self> {
        if let Ok(cache) = Self::load(path) {
            if cache.seed == seed && cache.truncation == truncation && cache.len() == size {
                return Ok(cache);
            }
        }
        let cache = Self::generate(seed, truncation, size)?;
        cache.save(path)?;
        Ok(cache)
    }
}

/// Asymptotic p-value of `n T_n(s)` with its Monte Carlo standard error.
pub fn tn_pvalue_asymptotic(stat: &StatValue, cache: &AdDrawCache) -> Result<(f64, f64)> {
    if stat.kind != StatKind::Integral {
        return domain("the A²/2 law applies to the integral statistic");
    }
    let s = stat.s.ok_or_else(|| Error::Domain("statistic carries no order".into()))?;
    if s > 2.0 {
        return domain(format!("no asymptotic law for the integral statistic at s = {s} > 2"));
    }
    let x = stat.n as f64 * stat.statistic;
    if x <= 0.0 {
        return Ok((1.0, 0.0));
    }
    Ok(cache.upper_tail(x))
}
