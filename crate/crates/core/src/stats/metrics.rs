use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `σ̂² = Σ (D₂y)² / (2(T-1))`, consistent for the noise variance of a random
/// walk with piecewise-constant drift.
pub fn sigma2_second_diff(y: &[f64]) -> Result<f64> {
    if y.len() < 3 {
        return Err(Error::TooShort {
            got: y.len(),
            need: 3,
        });
    }
    let t_minus_1 = (y.len() - 2) as f64;
    let ss: f64 = y
        .windows(3)
        .map(|w| {
            let d = w[0] - 2.0 * w[1] + w[2];
            d * d
        })
        .sum();
    Ok(ss / (2.0 * t_minus_1))
}

fn check_pair(y: &[f64], trend: &[f64]) -> Result<()> {
    if y.len() != trend.len() {
        return Err(Error::Dimension(format!(
            "series has {} values, trend has {}",
            y.len(),
            trend.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::TooShort {
            got: y.len(),
            need: 2,
        });
    }
    Ok(())
}

/// Residual mean square `Σ (y_t - x_t)² / T`. Note the divisor is `T`, one
/// less than the number of terms.
pub fn sigma2_residual_mse(y: &[f64], trend: &[f64]) -> Result<f64> {
    check_pair(y, trend)?;
    let ss: f64 = y.iter().zip(trend).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(ss / (y.len() - 1) as f64)
}

/// `sqrt(Σ (y_t - x_t)² / T)`, same divisor as [`sigma2_residual_mse`].
pub fn rmse(y: &[f64], trend: &[f64]) -> Result<f64> {
    sigma2_residual_mse(y, trend).map(f64::sqrt)
}

/// Closed index interval `[lo, hi]`; a change somewhere between `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: usize) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Distance from `t` to the interval, zero inside.
    pub fn distance(&self, t: usize) -> usize {
        if t < self.lo {
            self.lo - t
        } else {
            t.saturating_sub(self.hi)
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Merge flagged indices into intervals: a run `i..=j` becomes `[i, j + 1]`,
/// so a lone index `i` reads "between `i` and `i + 1`".
///
/// ```
/// use trendbreak::stats::{merge_adjacent, Interval};
/// assert_eq!(merge_adjacent(&[5]), vec![Interval::new(5, 6)]);
/// assert_eq!(merge_adjacent(&[19, 20, 21]), vec![Interval::new(19, 22)]);
/// ```
pub fn merge_adjacent(indices: &[usize]) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    for &i in indices {
        match out.last_mut() {
            Some(last) if i == last.hi => last.hi = i + 1,
            _ => out.push(Interval::new(i, i + 1)),
        }
    }
    out
}

/// Check intervals are well formed, sorted and pairwise disjoint.
pub fn validate_intervals(intervals: &[Interval]) -> Result<()> {
    for (k, iv) in intervals.iter().enumerate() {
        if iv.lo > iv.hi {
            return Err(Error::Intervals(format!("interval {iv} is reversed")));
        }
        if k > 0 && intervals[k - 1].hi >= iv.lo {
            return Err(Error::Intervals(format!(
                "{} and {iv} overlap or are out of order",
                intervals[k - 1]
            )));
        }
    }
    Ok(())
}

/// Detection quality against known change points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub fdr: f64,
    pub per_true_cp_hits: BTreeMap<usize, bool>,
}

/// Score detected intervals against the true change points.
///
/// An interval is a true positive when, widened by `slack` on both sides, it
/// contains a true change point not already claimed by a closer interval.
pub fn score_detections(
    intervals: &[Interval],
    true_cps: &[usize],
    slack: usize,
) -> Result<DetectionMetrics> {
    validate_intervals(intervals)?;
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for (i, iv) in intervals.iter().enumerate() {
        for (c, &cp) in true_cps.iter().enumerate() {
            let d = iv.distance(cp);
            if d <= slack {
                candidates.push((d, i, c));
            }
        }
    }
    candidates.sort_unstable();
    let mut interval_hit = vec![false; intervals.len()];
    let mut cp_hit = vec![false; true_cps.len()];
    for (_, i, c) in candidates {
        if !interval_hit[i] && !cp_hit[c] {
            interval_hit[i] = true;
            cp_hit[c] = true;
        }
    }
    let tp = interval_hit.iter().filter(|&&h| h).count();
    let fp = intervals.len() - tp;
    let fdr = if tp + fp == 0 {
        0.0
    } else {
        fp as f64 / (tp + fp) as f64
    };
    Ok(DetectionMetrics {
        true_positives: tp,
        false_positives: fp,
        fdr,
        per_true_cp_hits: true_cps.iter().copied().zip(cp_hit).collect(),
    })
}
