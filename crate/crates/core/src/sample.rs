use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted batch of observations inside `(0, 1)`.
///
/// Observations are assumed to be probability-integral transforms of draws
/// from a continuous distribution, so ties are tolerated but reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    has_ties: bool,
}

/// A maximal interval `[left, right)` on which the empirical d.f. equals `level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub left: f64,
    pub right: f64,
    /// Number of observations `≤ left` (0 on the first segment).
    pub count: usize,
    /// `count / n`.
    pub level: f64,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if let Some(bad) = values.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
            return Err(Error::InvalidSample(format!(
                "observation {bad} is not strictly inside (0, 1)"
            )));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Self::from_sorted_unchecked(values))
    }

    /// Wraps values that are already sorted and inside `(0, 1)`.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSample("values are not sorted".into()));
        }
        Sample::new(values)
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let has_ties = values.windows(2).any(|w| w[0] == w[1]);
        if has_ties {
            log::warn!("sample contains tied observations; continuous null assumed");
        }
        Sample { values, has_ties }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    /// Order statistic `X_(i)`, 1-based.
    pub fn order_stat(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// Empirical d.f. `𝔽_n(x)` (right-continuous).
    pub fn ecdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.n() as f64
    }

    /// The sample reflected through `x ↦ 1 - x`.
    pub fn reflect(&self) -> Sample {
        Sample::from_sorted_unchecked(self.values.iter().rev().map(|x| 1.0 - x).collect())
    }

    /// Applies a nondecreasing map into `(0, 1)` to every observation.
    pub fn map_monotone<F: Fn(f64) -> f64>(&self, f: F) -> Result<Sample> {
        Sample::new(self.values.iter().map(|&x| f(x)).collect())
    }

    /// Constancy intervals of `𝔽_n` over `[0, 1)`, ties merged.
    pub fn segments(&self) -> Segments<'_> {
        Segments { values: &self.values, pos: 0, started: false, n: self.n() as f64 }
    }
}

pub struct Segments<'a> {
    values: &'a [f64],
    pos: usize,
    started: bool,
    n: f64,
}

impl Iterator for Segments<'_> {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        let len = self.values.len();
        if !self.started {
            self.started = true;
            return Some(Segment { left: 0.0, right: self.values[0], count: 0, level: 0.0 });
        }
        if self.pos >= len {
            return None;
        }
        let left = self.values[self.pos];
        let mut end = self.pos + 1;
        while end < len && self.values[end] == left {
            end += 1;
        }
        self.pos = end;
        let right = if end < len { self.values[end] } else { 1.0 };
        Some(Segment { left, right, count: end, level: end as f64 / self.n })
    }
}
