//! Seeded, parallel Monte Carlo experiments.
//!
//! Replication `i` draws from `stream_rng(seed, index)` with an index that
//! depends only on `i` (and the sample role), and results are collected in
//! replication order, so outcomes do not depend on the number of threads.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alternatives::{limit_sampler_prop43, sup_ratio_tail, AlternativeCdf, MixtureParams};
use crate::asymptotic::{centering, quantile_asymptotic};
use crate::bands::{band_at_level, band_covers, critical_value, Method};
use crate::divergence::DivergenceOrder;
use crate::error::{domain, Result};
use crate::exact::{quantile_exact_with, ExactConfig};
use crate::rng::{sorted_uniforms, stream_rng};
use crate::sample::Sample;
use crate::statistics::{sn, sn_log, sn_plus, tn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NullCalibration,
    BandCoverage,
    PoissonBoundary,
    Detection,
}

/// One sparse-mixture alternative `(β, r)` of a detection experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionCell {
    pub beta: f64,
    pub r: f64,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_method() -> Method {
    Method::Exact
}

fn default_bins() -> usize {
    60
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub kind: ExperimentKind,
    pub n: usize,
    pub s_list: Vec<f64>,
    pub reps: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub seed: u64,
    #[serde(default = "default_method")]
    pub method: Method,
    /// Mixture alternatives (detection only).
    #[serde(default)]
    pub cells: Vec<DetectionCell>,
    /// Levels `x` at which `P(S_n(s) > x)` is compared with the limit law (Poisson boundary only).
    #[serde(default)]
    pub tail_levels: Vec<f64>,
    #[serde(default)]
    pub keep_draws: bool,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.n == 0 || self.s_list.is_empty() {
            return domain("plan needs reps >= 1, n >= 1 and at least one s");
        }
        if self.s_list.iter().any(|s| !s.is_finite()) {
            return domain("every s must be finite");
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return domain(format!("alpha must lie in [0, 1), got {}", self.alpha));
        }
        match self.kind {
            ExperimentKind::Detection => {
                if self.cells.is_empty() {
                    return domain("a detection plan needs at least one (beta, r) cell");
                }
                for c in &self.cells {
                    MixtureParams::new(self.n, c.beta, c.r)?;
                }
            }
            ExperimentKind::PoissonBoundary => {
                for &s in &self.s_list {
                    AlternativeCdf::poisson_boundary(s)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A proportion with its binomial standard error `√(p̂(1 − p̂)/reps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub rate: f64,
    pub se: f64,
    pub count: usize,
    pub reps: usize,
}

impl Rate {
    pub fn new(count: usize, reps: usize) -> Self {
        let rate = count as f64 / reps as f64;
        Rate { rate, se: (rate * (1.0 - rate) / reps as f64).sqrt(), count, reps }
    }

    fn of<I: IntoIterator<Item = bool>>(flags: I) -> Self {
        let (mut count, mut reps) = (0, 0);
        for f in flags {
            count += f as usize;
            reps += 1;
        }
        Rate::new(count, reps)
    }
}

/// Sample mean with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mean {
    pub mean: f64,
    pub se: f64,
}

impl Mean {
    pub fn of(values: &[f64]) -> Self {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
        Mean { mean, se: (var / m).sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub x: f64,
    pub empirical: Rate,
    pub reference: f64,
}

/// Per-`s` (and per-cell) outcome. Fields not produced by an experiment kind are omitted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<DetectionCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method_used: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection_exact: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection_asymptotic: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<Rate>,
    /// Detection threshold on `n S_n⁺(s)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Mean of `n S_n(s) − r_n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_centered: Option<Mean>,
    /// Mean of `n T_n(s)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_scaled_integral: Option<Mean>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub tails: Vec<TailCheck>,
    /// Two-sample Kolmogorov distance between statistic and limit-law draws.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_draw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistogramStatistic {
    /// `n S_n(s) − r_n` (two-sided, centered).
    Centered,
    /// `n S_n⁺(s)` (one-sided, raw).
    RawPlus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub s: f64,
    pub cell: DetectionCell,
    pub statistic: HistogramStatistic,
    /// `"H0"` or `"H1"`.
    pub hypothesis: String,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub version: String,
    pub plan: ExperimentPlan,
    pub summaries: Vec<Summary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub histograms: Vec<Histogram>,
    pub runtime_seconds: f64,
}

impl ExperimentResult {
    /// Equality of everything except the wall-clock runtime.
    pub fn same_outcome(&self, other: &ExperimentResult) -> bool {
        self.plan == other.plan && self.summaries == other.summaries && self.histograms == other.histograms
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// Histogram rows `s,hypothesis,bin_left,bin_right,count` for one statistic.
    ///
    /// With several cells the hypothesis label carries the cell, e.g. `H1[beta=0.5,r=0.15]`.
    pub fn histogram_csv(&self, statistic: HistogramStatistic) -> String {
        let mut out = String::from("s,hypothesis,bin_left,bin_right,count\n");
        let multi = self.plan.cells.len() > 1;
        for h in self.histograms.iter().filter(|h| h.statistic == statistic) {
            let label = if multi {
                format!("{}[beta={},r={}]", h.hypothesis, h.cell.beta, h.cell.r)
            } else {
                h.hypothesis.clone()
            };
            for (k, count) in h.counts.iter().enumerate() {
                writeln!(out, "{},{},{},{},{}", h.s, label, h.edges[k], h.edges[k + 1], count).expect("write");
            }
        }
        out
    }

    /// Raw draws as rows `s,index,value`.
    pub fn draws_csv(&self) -> String {
        let mut out = String::from("s,index,value\n");
        for summary in &self.summaries {
            for (i, v) in summary.draws.iter().flatten().enumerate() {
                writeln!(out, "{},{},{}", summary.s, i, v).expect("write");
            }
        }
        out
    }
}

pub fn run(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    match plan.kind {
        ExperimentKind::NullCalibration => run_null_calibration(plan),
        ExperimentKind::BandCoverage => run_band_coverage(plan),
        ExperimentKind::PoissonBoundary => run_poisson_boundary(plan),
        ExperimentKind::Detection => run_detection(plan),
    }
}

fn finish(plan: &ExperimentPlan, summaries: Vec<Summary>, histograms: Vec<Histogram>, start: Instant) -> ExperimentResult {
    ExperimentResult {
        version: env!("CARGO_PKG_VERSION").to_string(),
        plan: plan.clone(),
        summaries,
        histograms,
        runtime_seconds: start.elapsed().as_secs_f64(),
    }
}

fn uniform_sample(seed: u64, index: u64, n: usize) -> Sample {
    Sample::from_sorted_unchecked(sorted_uniforms(&mut stream_rng(seed, index), n))
}

fn orders(plan: &ExperimentPlan) -> Result<Vec<DivergenceOrder>> {
    plan.s_list.iter().map(|&s| DivergenceOrder::new(s)).collect()
}

/// Null rejection rates at exact and asymptotic critical values, with the
/// centered statistic and `n T_n(s)` recorded per replication.
pub fn run_null_calibration(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let start = Instant::now();
    let orders = orders(plan)?;
    let config = ExactConfig::default();
    let n = plan.n;
    let exact_q: Vec<Option<f64>> = orders
        .iter()
        .map(|&o| match () {
            _ if plan.alpha == 0.0 => Ok(Some(f64::INFINITY)),
            _ if plan.method == Method::Exact && n <= config.n_max => quantile_exact_with(n, o, plan.alpha, &config).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let asym_q: Vec<Option<f64>> = orders
        .iter()
        .map(|o| if plan.alpha == 0.0 { Some(f64::INFINITY) } else { quantile_asymptotic(n, o.s(), plan.alpha).ok() })
        .collect();
    let r_n = centering(n).ok().map(|c| c.r_n);
    // Per replication and order: (S_n, n T_n).
    let stats: Vec<Vec<(f64, f64)>> = (0..plan.reps as u64)
        .into_par_iter()
        .map(|i| {
            let x = uniform_sample(plan.seed, i, n);
            orders
                .iter()
                .map(|&o| {
                    let t = tn(o, &x).map(|v| v.scaled()).unwrap_or(f64::NAN);
                    (sn(o, &x).statistic, t)
                })
                .collect()
        })
        .collect();
    let summaries = orders
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let column: Vec<(f64, f64)> = stats.iter().map(|row| row[k]).collect();
            let centered: Option<Vec<f64>> = r_n.map(|r| column.iter().map(|(s, _)| n as f64 * s - r).collect());
            let integrals: Vec<f64> = column.iter().map(|c| c.1).filter(|t| t.is_finite()).collect();
            Summary {
                s: o.s(),
                critical_exact: exact_q[k],
                critical_asymptotic: asym_q[k],
                rejection_exact: exact_q[k].map(|q| Rate::of(column.iter().map(|(s, _)| *s > q))),
                rejection_asymptotic: asym_q[k].map(|q| Rate::of(column.iter().map(|(s, _)| *s > q))),
                mean_centered: centered.as_deref().map(Mean::of),
                mean_scaled_integral: (!integrals.is_empty()).then(|| Mean::of(&integrals)),
                draws: plan
                    .keep_draws
                    .then(|| centered.clone().unwrap_or_else(|| column.iter().map(|(s, _)| n as f64 * s).collect())),
                ..Summary::default()
            }
        })
        .collect();
    Ok(finish(plan, summaries, Vec::new(), start))
}

/// Coverage of the uniform d.f. by `band()` under null draws.
pub fn run_band_coverage(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let start = Instant::now();
    let orders = orders(plan)?;
    let config = ExactConfig::default();
    let levels: Vec<(f64, Method)> = orders
        .iter()
        .map(|&o| {
            if plan.alpha == 0.0 {
                Ok((f64::INFINITY, plan.method))
            } else {
                critical_value(plan.n, o, plan.alpha, plan.method, &config, None)
            }
        })
        .collect::<Result<_>>()?;
    let covered: Vec<Vec<bool>> = (0..plan.reps as u64)
        .into_par_iter()
        .map(|i| {
            let x = uniform_sample(plan.seed, i, plan.n);
            orders
                .iter()
                .zip(&levels)
                .map(|(&o, &(q, m))| {
                    let b = band_at_level(&x, o, q, plan.alpha, m).expect("valid level");
                    band_covers(&b, |t| t)
                })
                .collect()
        })
        .collect();
    let summaries = orders
        .iter()
        .enumerate()
        .map(|(k, o)| Summary {
            s: o.s(),
            critical_exact: (levels[k].1 == Method::Exact).then_some(levels[k].0),
            critical_asymptotic: (levels[k].1 == Method::Asymptotic).then_some(levels[k].0),
            method_used: Some(levels[k].1),
            coverage: Some(Rate::of(covered.iter().map(|row| row[k]))),
            ..Summary::default()
        })
        .collect();
    Ok(finish(plan, summaries, Vec::new(), start))
}

/// `P(V > x)` for the limit variable `V` of `S_n(s)` under `F_s`.
pub fn poisson_limit_tail(s: f64, x: f64) -> Result<f64> {
    if s >= 1.0 {
        Ok((s * x).powf(-1.0 / s).min(1.0))
    } else if s < 0.0 {
        let y = ((1.0 - s) * x).powf(-1.0 / s);
        if y > 1.0 {
            sup_ratio_tail(y)
        } else {
            Ok(1.0)
        }
    } else {
        domain(format!("no Poisson boundary limit law for 0 <= s < 1, got {s}"))
    }
}

fn two_sample_ks(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).expect("no NaN"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("no NaN"));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0_f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `S_n(s)` under the boundary d.f. `F_s` against its Poisson-process limit law.
///
/// Statistics are computed from log-scale samples, since `F_s` with `s` near 1
/// puts mass far below the smallest positive double.
pub fn run_poisson_boundary(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let start = Instant::now();
    let orders = orders(plan)?;
    let reps = plan.reps as u64;
    let mut summaries = Vec::new();
    for (k, &o) in orders.iter().enumerate() {
        let alt = AlternativeCdf::poisson_boundary(o.s())?;
        let base = k as u64 * 2 * reps;
        let mut draws: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|i| {
                let logs = alt.sample_ln(&mut stream_rng(plan.seed, base + i), plan.n)?;
                Ok(sn_log(o, &logs)?.statistic)
            })
            .collect::<Result<_>>()?;
        let mut limit: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|i| limit_sampler_prop43(o.s(), &mut stream_rng(plan.seed, base + reps + i)))
            .collect::<Result<_>>()?;
        let tails = plan
            .tail_levels
            .iter()
            .map(|&x| {
                Ok(TailCheck {
                    x,
                    empirical: Rate::of(draws.iter().map(|&d| d > x)),
                    reference: poisson_limit_tail(o.s(), x)?,
                })
            })
            .collect::<Result<_>>()?;
        let kept = plan.keep_draws.then(|| draws.clone());
        let ks = two_sample_ks(&mut draws, &mut limit);
        summaries.push(Summary {
            s: o.s(),
            tails,
            ks_distance: Some(ks),
            min_draw: Some(draws[0]),
            draws: kept,
            ..Summary::default()
        });
    }
    Ok(finish(plan, summaries, Vec::new(), start))
}

fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> (Vec<f64>, Vec<usize>) {
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges = (0..=bins).map(|k| lo + k as f64 * width).collect();
    let mut counts = vec![0; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    (edges, counts)
}

/// Power and size of `n S_n⁺(s) ≥ log log n` against sparse normal mixtures,
/// with histograms of `n S_n(s) − r_n` and `n S_n⁺(s)` under both hypotheses.
pub fn run_detection(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let start = Instant::now();
    let orders = orders(plan)?;
    let n = plan.n;
    let nf = n as f64;
    let threshold = nf.ln().ln();
    let r_n = centering(n)?.r_n;
    let alts: Vec<AlternativeCdf> =
        plan.cells.iter().map(|c| Ok(MixtureParams::new(n, c.beta, c.r)?.alternative())).collect::<Result<_>>()?;
    let roles = plan.cells.len() as u64 + 1;
    // stats[i][role][k] = (n S_n⁺, n S_n − r_n); role 0 is H0.
    let stats: Vec<Vec<Vec<(f64, f64)>>> = (0..plan.reps as u64)
        .into_par_iter()
        .map(|i| {
            (0..roles)
                .map(|role| {
                    let index = i * roles + role;
                    let x = if role == 0 {
                        uniform_sample(plan.seed, index, n)
                    } else {
                        alts[role as usize - 1].sample(&mut stream_rng(plan.seed, index), n)?
                    };
                    orders
                        .iter()
                        .map(|&o| Ok((nf * sn_plus(o, &x, 0.5)?.statistic, nf * sn(o, &x).statistic - r_n)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let column = |role: usize, k: usize| -> Vec<(f64, f64)> { stats.iter().map(|rep| rep[role][k]).collect() };
    let mut summaries = Vec::new();
    let mut histograms = Vec::new();
    for (k, o) in orders.iter().enumerate() {
        let h0 = column(0, k);
        let size = Rate::of(h0.iter().map(|v| v.0 >= threshold));
        for (c, cell) in plan.cells.iter().enumerate() {
            let h1 = column(c + 1, k);
            summaries.push(Summary {
                s: o.s(),
                cell: Some(*cell),
                size: Some(size),
                power: Some(Rate::of(h1.iter().map(|v| v.0 >= threshold))),
                threshold: Some(threshold),
                ..Summary::default()
            });
            for statistic in [HistogramStatistic::Centered, HistogramStatistic::RawPlus] {
                let pick = |v: &(f64, f64)| if statistic == HistogramStatistic::Centered { v.1 } else { v.0 };
                let a: Vec<f64> = h0.iter().map(pick).filter(|v| v.is_finite()).collect();
                let b: Vec<f64> = h1.iter().map(pick).filter(|v| v.is_finite()).collect();
                let lo = a.iter().chain(&b).copied().fold(f64::INFINITY, f64::min);
                let hi = a.iter().chain(&b).copied().fold(f64::NEG_INFINITY, f64::max);
                for (label, values) in [("H0", &a), ("H1", &b)] {
                    if values.is_empty() {
                        continue;
                    }
                    let (edges, counts) = histogram(values, lo, hi, plan.histogram_bins.max(1));
                    histograms.push(Histogram {
                        s: o.s(),
                        cell: *cell,
                        statistic,
                        hypothesis: label.to_string(),
                        edges,
                        counts,
                        mean: Mean::of(values).mean,
                    });
                }
            }
        }
    }
    Ok(finish(plan, summaries, histograms, start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(kind: ExperimentKind) -> ExperimentPlan {
        ExperimentPlan {
            kind,
            n: 20,
            s_list: vec![0.5, 1.0],
            reps: 400,
            alpha: 0.1,
            seed: 9,
            method: Method::Exact,
            cells: vec![],
            tail_levels: vec![],
            keep_draws: true,
            histogram_bins: 10,
        }
    }

    #[test]
    fn null_calibration_is_deterministic_and_sane() {
        let p = plan(ExperimentKind::NullCalibration);
        let a = run(&p).unwrap();
        let b = run(&p).unwrap();
        assert!(a.same_outcome(&b));
        for s in &a.summaries {
            let r = s.rejection_exact.unwrap();
            assert!((r.rate - 0.1).abs() < 4.0 * (0.09f64 / 400.0).sqrt());
            assert_eq!(s.draws.as_ref().unwrap().len(), 400);
            assert!(s.mean_centered.is_some());
        }
        let zero = run(&ExperimentPlan { alpha: 0.0, ..p }).unwrap();
        assert!(zero.summaries.iter().all(|s| s.rejection_exact.unwrap().count == 0));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let p = plan(ExperimentKind::BandCoverage);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run(&p).unwrap());
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| run(&p).unwrap());
        assert!(one.same_outcome(&four));
        let cov = one.summaries[0].coverage.unwrap();
        assert!((cov.rate - 0.9).abs() < 4.0 * cov.se.max(0.015));
    }

    #[test]
    fn poisson_boundary_small_run() {
        let p = ExperimentPlan {
            n: 2000,
            s_list: vec![1.0, 2.0, -1.0],
            reps: 300,
            tail_levels: vec![2.0],
            ..plan(ExperimentKind::PoissonBoundary)
        };
        let res = run(&p).unwrap();
        for s in &res.summaries {
            assert!(s.ks_distance.unwrap() < 0.2, "{s:?}");
        }
        assert!((poisson_limit_tail(1.0, 4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((poisson_limit_tail(-1.0, 1.0).unwrap() - sup_ratio_tail(2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn detection_small_run_and_csv() {
        let p = ExperimentPlan {
            n: 2000,
            s_list: vec![1.0],
            reps: 20,
            cells: vec![DetectionCell { beta: 0.5, r: 0.5 }],
            ..plan(ExperimentKind::Detection)
        };
        let res = run(&p).unwrap();
        let s = &res.summaries[0];
        assert!(s.power.unwrap().rate >= s.size.unwrap().rate);
        let csv = res.histogram_csv(HistogramStatistic::Centered);
        assert!(csv.starts_with("s,hypothesis,bin_left,bin_right,count\n1,H0,"));
        assert_eq!(csv.lines().count(), 1 + 2 * 10);
        let counts: usize = res.histograms.iter().filter(|h| h.hypothesis == "H1").map(|h| h.counts.iter().sum::<usize>()).sum();
        assert_eq!(counts, 2 * 20);
        assert!(p.validate().is_ok());
        let bad = ExperimentPlan { cells: vec![], ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn plan_json_defaults() {
        let p: ExperimentPlan =
            serde_json::from_str(r#"{"kind":"band-coverage","n":50,"s_list":[0.5],"reps":10,"seed":1}"#).unwrap();
        assert_eq!(p.alpha, 0.05);
        assert_eq!(p.method, Method::Exact);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn ks_distance() {
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![1.0, 2.0, 3.0];
        assert_eq!(two_sample_ks(&mut a, &mut b), 0.0);
        let mut c = vec![10.0, 11.0];
        assert_eq!(two_sample_ks(&mut a, &mut c), 1.0);
    }
}
