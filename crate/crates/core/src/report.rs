//! Detection reports and `λ`-scan tables, with their CSV and JSON encodings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l1::ThresholdRule;
use crate::stats::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hp,
    L1,
    Pelt,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Hp, Method::L1, Method::Pelt];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hp => "hp",
            Method::L1 => "l1",
            Method::Pelt => "pelt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hp" => Ok(Method::Hp),
            "l1" => Ok(Method::L1),
            "pelt" => Ok(Method::Pelt),
            other => Err(Error::Parameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Fit-quality numbers attached to a report; absent when not applicable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rmse: Option<f64>,
    pub shapiro_p: Option<f64>,
    pub df_hat: Option<f64>,
    pub prob: Option<f64>,
    pub sigma2_hat: Option<f64>,
}

/// Output of a single detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointReport {
    pub method: Method,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub threshold_rule: Option<ThresholdRule>,
    pub penalty: Option<f64>,
    pub intervals: Vec<Interval>,
    pub flagged_indices: Vec<usize>,
    pub diagnostics: Diagnostics,
    pub series_length: usize,
}

impl ChangePointReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))
    }

    /// Intervals as CSV with `lo,hi` and, when given, the matching labels.
    pub fn intervals_csv(&self, labels: Option<&[String]>) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: &[&str] = if labels.is_some() {
            &["lo", "hi", "lo_label", "hi_label"]
        } else {
            &["lo", "hi"]
        };
        w.write_record(header).map_err(csv_err)?;
        for iv in &self.intervals {
            let mut rec = vec![iv.lo.to_string(), iv.hi.to_string()];
            if let Some(l) = labels {
                let at = |i: usize| l.get(i).cloned().unwrap_or_default();
                rec.push(at(iv.lo));
                rec.push(at(iv.hi));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        finish(w)
    }
}

/// Rows of a `λ` scan plus the selected value, if any qualified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScanTable<R> {
    pub rows: Vec<R>,
    pub selected_lambda: Option<f64>,
}

impl<R: Serialize> LambdaScanTable<R> {
    pub fn to_csv(&self) -> Result<String> {
        to_csv(&self.rows)
    }
}

/// Serialize records as CSV with a header row.
pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parameter("lambda grid is empty".into()));
    }
    if grid.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Parameter(
            "lambda grid values must be finite and non-negative".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter(
            "lambda grid must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// `lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn lambda_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Parameter(format!("bad grid {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}
