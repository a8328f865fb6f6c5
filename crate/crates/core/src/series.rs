use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of observations either detector accepts.
pub const MIN_LEN: usize = 5;

/// An ordered sequence of observations `y_0..y_T`, optionally labelled (dates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::build(values, None)
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} values",
                labels.len(),
                values.len()
            )));
        }
        Self::build(values, Some(labels))
    }

    fn build(values: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.len() < MIN_LEN {
            return Err(Error::TooShort {
                got: values.len(),
                need: MIN_LEN,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, labels })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of index `t`, or the index itself when the series is unlabelled.
    pub fn label(&self, t: usize) -> String {
        match &self.labels {
            Some(l) => l[t].clone(),
            None => t.to_string(),
        }
    }

    /// Number of observations, `T + 1`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The last index `T`.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
