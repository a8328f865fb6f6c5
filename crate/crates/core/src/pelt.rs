//! PELT with the squared-error (change in mean) segment cost.
//!
//! Minimizes `Σ_segments Σ (y_t - ȳ_seg)² + penalty · K` over segmentations
//! whose breakpoints lie on a grid of multiples of `jump` and whose segments
//! have at least `min_size` points. `jump = 1, min_size = 1` is the
//! unconstrained problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{ChangePointReport, Diagnostics, Method};
use crate::series::TimeSeries;
use crate::stats::merge_adjacent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeltConfig {
    pub penalty: f64,
    pub min_size: usize,
    pub jump: usize,
}

impl Default for PeltConfig {
    /// Penalty 1 on a breakpoint grid of multiples of 5 with segments of at
    /// least 2 points.
    fn default() -> Self {
        Self {
            penalty: 1.0,
            min_size: 2,
            jump: 5,
        }
    }
}

impl PeltConfig {
    /// Every index is a candidate breakpoint and single-point segments are allowed.
    pub fn unconstrained(penalty: f64) -> Self {
        Self {
            penalty,
            min_size: 1,
            jump: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.penalty >= 0.0) || !self.penalty.is_finite() {
            return Err(Error::Parameter(format!(
                "penalty must be finite and non-negative, got {}",
                self.penalty
            )));
        }
        if self.min_size == 0 || self.jump == 0 {
            return Err(Error::Parameter(
                "min_size and jump must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Whether `b` may end a segment (exclusive end) other than the last.
    fn is_breakpoint(&self, b: usize, n: usize) -> bool {
        b.is_multiple_of(self.jump) && b >= self.min_size && b + self.min_size <= n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeltResult {
    /// Last index of each segment except the final one.
    pub change_points: Vec<usize>,
    pub segment_costs: Vec<f64>,
    pub total_objective: f64,
}

/// Prefix sums giving the squared-error cost of `y[a..b]` in O(1).
pub(crate) struct SegmentCost {
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl SegmentCost {
    pub(crate) fn new(y: &[f64]) -> Self {
        let centre = y.iter().sum::<f64>() / y.len().max(1) as f64;
        let mut s1 = Vec::with_capacity(y.len() + 1);
        let mut s2 = Vec::with_capacity(y.len() + 1);
        s1.push(0.0);
        s2.push(0.0);
        for v in y {
            let v = v - centre;
            s1.push(s1.last().unwrap() + v);
            s2.push(s2.last().unwrap() + v * v);
        }
        Self { s1, s2 }
    }

    pub(crate) fn cost(&self, a: usize, b: usize) -> f64 {
        let len = (b - a) as f64;
        let s = self.s1[b] - self.s1[a];
        (self.s2[b] - self.s2[a] - s * s / len).max(0.0)
    }
}

/// Optimal segmentation by PELT.
///
/// ```
/// use trendbreak::pelt::{pelt_l2, PeltConfig};
/// use trendbreak::TimeSeries;
/// let y = TimeSeries::new(vec![0.0, 0.0, 0.0, 10.0, 10.0, 10.0]).unwrap();
/// let r = pelt_l2(&y, &PeltConfig::unconstrained(1.0)).unwrap();
/// assert_eq!(r.change_points, vec![2]);
/// ```
pub fn pelt_l2(y: &TimeSeries, config: &PeltConfig) -> Result<PeltResult> {
    config.validate()?;
    let y = y.values();
    let n = y.len();
    let cost = SegmentCost::new(y);
    let pen = config.penalty;
    let min = config.min_size;

    // best[b]: optimal objective of y[..b] with b a segment end; prev[b] its last start.
    let mut best = vec![f64::INFINITY; n + 1];
    let mut prev = vec![usize::MAX; n + 1];
    best[0] = 0.0;
    // Active starts, each with the endpoint at which it was found dominated.
    let mut active: Vec<(usize, Option<usize>)> = vec![(0, None)];

    let ends = (1..=n).filter(|&b| b == n || config.is_breakpoint(b, n));
    for end in ends {
        // A start pruned at endpoint p stays usable for ends within p + min
        // because the segment from p would be too short to dominate it there.
        active.retain(|&(_, pruned)| pruned.is_none_or(|p| end < p + min));
        let mut f = f64::INFINITY;
        let mut arg = usize::MAX;
        let mut values = Vec::with_capacity(active.len());
        for &(s, _) in &active {
            if s + min > end {
                values.push(None);
                continue;
            }
            let v = best[s] + cost.cost(s, end) + pen;
            if v < f {
                f = v;
                arg = s;
            }
            values.push(Some(v));
        }
        best[end] = f;
        prev[end] = arg;
        for (slot, v) in active.iter_mut().zip(values) {
            if let Some(v) = v {
                if slot.1.is_none() && v > f + pen {
                    slot.1 = Some(end);
                }
            }
        }
        if end < n && f.is_finite() {
            active.push((end, None));
        }
    }

    let mut bounds = vec![n];
    let mut b = n;
    while b > 0 {
        b = prev[b];
        if b == usize::MAX {
            return Err(Error::Input(format!(
                "no admissible segmentation of {n} points with min_size {min}"
            )));
        }
        bounds.push(b);
    }
    bounds.reverse();
    let segment_costs: Vec<f64> = bounds.windows(2).map(|w| cost.cost(w[0], w[1])).collect();
    let change_points: Vec<usize> = bounds[1..bounds.len() - 1].iter().map(|b| b - 1).collect();
    let total_objective = segment_costs.iter().sum::<f64>() + pen * change_points.len() as f64;
    Ok(PeltResult {
        change_points,
        segment_costs,
        total_objective,
    })
}

/// Run PELT and report each change point `t` as the interval `[t, t + 1]`.
pub fn pelt_detect(y: &TimeSeries, config: &PeltConfig) -> Result<ChangePointReport> {
    let r = pelt_l2(y, config)?;
    Ok(ChangePointReport {
        method: Method::Pelt,
        lambda: None,
        alpha: None,
        threshold_rule: None,
        penalty: Some(config.penalty),
        intervals: merge_adjacent(&r.change_points),
        flagged_indices: r.change_points,
        diagnostics: Diagnostics::default(),
        series_length: y.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_has_no_change() {
        let y = TimeSeries::new(vec![4.0; 30]).unwrap();
        for cfg in [PeltConfig::default(), PeltConfig::unconstrained(1.0)] {
            let r = pelt_l2(&y, &cfg).unwrap();
            assert!(r.change_points.is_empty());
            assert_eq!(r.total_objective, 0.0);
        }
    }

    #[test]
    fn grid_caps_the_count() {
        // Alternating levels: every grid point is worth a split.
        let v: Vec<f64> = (0..100)
            .map(|t| if (t / 5) % 2 == 0 { 0.0 } else { 100.0 })
            .collect();
        let r = pelt_l2(&TimeSeries::new(v).unwrap(), &PeltConfig::default()).unwrap();
        assert_eq!(r.change_points.len(), 19);
        assert!(r.change_points.iter().all(|c| (c + 1) % 5 == 0));
    }

    #[test]
    fn bad_config_rejected() {
        let y = TimeSeries::new(vec![1.0; 6]).unwrap();
        for c in [
            PeltConfig {
                penalty: -1.0,
                ..PeltConfig::default()
            },
            PeltConfig {
                jump: 0,
                ..PeltConfig::default()
            },
        ] {
            assert!(pelt_l2(&y, &c).is_err());
        }
    }
}
