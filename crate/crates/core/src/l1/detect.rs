use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::L1Fit;
use crate::error::{Error, Result};
use crate::hp::shapiro_p;
use crate::report::{ChangePointReport, Diagnostics, Method};
use crate::series::TimeSeries;
use crate::stats::{self, merge_adjacent};

/// How large a kink must be to count as a change point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ThresholdRule {
    /// Keep the `⌈df⌉` largest kinks.
    MaxDf,
    /// Keep kinks at or above the empirical `1 - α` quantile of the magnitudes.
    Percentile(f64),
    /// Keep the `k` largest kinks.
    TopK(usize),
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::MaxDf => f.write_str("max-df"),
            ThresholdRule::Percentile(a) => write!(f, "percentile:{a}"),
            ThresholdRule::TopK(k) => write!(f, "top-k:{k}"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("bad threshold rule `{s}`"));
        match s.split_once(':') {
            None if s == "max-df" => Ok(ThresholdRule::MaxDf),
            Some(("percentile", a)) => {
                let a: f64 = a.parse().map_err(|_| bad())?;
                if !(a > 0.0 && a < 1.0) {
                    return Err(Error::Parameter(format!(
                        "percentile level must lie in (0, 1), got {a}"
                    )));
                }
                Ok(ThresholdRule::Percentile(a))
            }
            Some(("top-k", k)) => Ok(ThresholdRule::TopK(k.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl From<ThresholdRule> for String {
    fn from(r: ThresholdRule) -> Self {
        r.to_string()
    }
}

impl TryFrom<String> for ThresholdRule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Indices `k` of `magnitudes` admitted by the `k` largest, dropping a tie
/// group that straddles the cut. Zero magnitudes are never admitted.
fn top_k(magnitudes: &[f64], k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    let mut sorted = magnitudes.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let k = k.min(sorted.len());
    let cut = sorted[k - 1];
    let strict = k < sorted.len() && sorted[k] == cut;
    (0..magnitudes.len())
        .filter(|&i| {
            let m = magnitudes[i];
            m > 0.0 && if strict { m > cut } else { m >= cut }
        })
        .collect()
}

/// Kink positions (indices into `kink_magnitudes`) selected by `rule`.
pub fn l1_flagged(fit: &L1Fit, rule: ThresholdRule) -> Result<Vec<usize>> {
    let m = &fit.kink_magnitudes;
    match rule {
        ThresholdRule::MaxDf => Ok(top_k(m, fit.df_hat.max(0.0).ceil() as usize)),
        ThresholdRule::TopK(k) => {
            if k > m.len() {
                return Err(Error::Parameter(format!(
                    "top-k of {k} exceeds the {} available kinks",
                    m.len()
                )));
            }
            Ok(top_k(m, k))
        }
        ThresholdRule::Percentile(alpha) => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Parameter(format!(
                    "percentile level must lie in (0, 1), got {alpha}"
                )));
            }
            let mut sorted = m.clone();
            sorted.sort_by(f64::total_cmp);
            let cut = quantile_sorted(&sorted, 1.0 - alpha);
            Ok((0..m.len())
                .filter(|&i| m[i] > 0.0 && m[i] >= cut)
                .collect())
        }
    }
}

/// Detect change points from an ℓ₁ fit.
///
/// A flagged kink `k` (centred on series index `k + 1`) is reported as the
/// interval `[k, k + 1]`, the step leading into the kink.
pub fn l1_detect(y: &TimeSeries, fit: &L1Fit, rule: ThresholdRule) -> Result<ChangePointReport> {
    let flagged = l1_flagged(fit, rule)?;
    Ok(ChangePointReport {
        method: Method::L1,
        lambda: Some(fit.lambda),
        alpha: None,
        threshold_rule: Some(rule),
        penalty: None,
        intervals: merge_adjacent(&flagged),
        flagged_indices: flagged,
        diagnostics: Diagnostics {
            rmse: Some(stats::rmse(y.values(), &fit.trend)?),
            shapiro_p: shapiro_p(&fit.residuals),
            df_hat: Some(fit.df_hat),
            prob: None,
            sigma2_hat: None,
        },
        series_length: y.len(),
    })
}
