//! ℓ₁ trend filtering: `min ½‖y - x‖² + 2λ‖D₂x‖₁`.
//!
//! The solution is piecewise linear in `t`; its kinks (non-zero entries of
//! `D₂x̂`) are the change-point candidates. Two optimizers are provided:
//! sign-based RPROP started at `x = y`, and an accelerated proximal gradient
//! method on the dual problem that converges to the exact minimizer.

mod detect;
mod df;
mod proximal;
mod rprop;
mod scan;

use serde::{Deserialize, Serialize};

pub use detect::{l1_detect, l1_flagged, ThresholdRule};
pub use df::{l1_df, l1_df_with_floor};
pub use proximal::{l1_fit_proximal, soft_threshold};
pub use rprop::l1_fit_rprop;
pub use scan::{
    l1_lambda_lower_bound, l1_lambda_scan, large_lambda_sigma, standardize_residuals, L1LambdaRow,
    L1ScanOptions,
};

use crate::error::{Error, Result};
use crate::linalg::{second_difference, second_difference_transpose_apply};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    #[default]
    Rprop,
    Proximal,
}

impl std::str::FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rprop" => Ok(Optimizer::Rprop),
            "proximal" => Ok(Optimizer::Proximal),
            other => Err(Error::Parameter(format!("unknown optimizer `{other}`"))),
        }
    }
}

impl std::fmt::Display for Optimizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Optimizer::Rprop => "rprop",
            Optimizer::Proximal => "proximal",
        })
    }
}

/// RPROP step-size schedule. One scalar step is shared by all coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpropParams {
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub step_max: f64,
    pub step_min: f64,
    pub step_init: f64,
}

impl Default for RpropParams {
    fn default() -> Self {
        Self {
            eta_plus: 1.2,
            eta_minus: 0.5,
            step_max: 50.0,
            step_min: 1e-6,
            step_init: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximalParams {
    /// Fraction in `(0, 1]` of the largest safe dual step `1/16`.
    pub step_scale: f64,
    pub max_iterations: usize,
    /// Stop once the duality gap falls below this fraction of the objective.
    pub tolerance: f64,
}

impl Default for ProximalParams {
    fn default() -> Self {
        Self {
            step_scale: 1.0,
            max_iterations: 20_000,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Config {
    pub optimizer: Optimizer,
    /// RPROP iteration count.
    pub max_iterations: usize,
    pub rprop: RpropParams,
    pub proximal: ProximalParams,
    /// Lower clamp on `|D₂x̂|` before it is inverted in the df estimate.
    pub w_floor: f64,
}

impl Default for L1Config {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::default(),
            max_iterations: 400,
            rprop: RpropParams::default(),
            proximal: ProximalParams::default(),
            w_floor: 1e-8,
        }
    }
}

impl L1Config {
    pub fn validate(&self) -> Result<()> {
        let r = &self.rprop;
        if !(0.0 < r.eta_minus && r.eta_minus < 1.0 && r.eta_plus > 1.0) {
            return Err(Error::Parameter("need 0 < eta_minus < 1 < eta_plus".into()));
        }
        if !(0.0 < r.step_min && r.step_min < r.step_max && r.step_init > 0.0) {
            return Err(Error::Parameter(
                "need 0 < step_min < step_max and step_init > 0".into(),
            ));
        }
        let p = &self.proximal;
        if !(p.step_scale > 0.0 && p.step_scale <= 1.0) {
            return Err(Error::Parameter(format!(
                "proximal step scale must lie in (0, 1], got {}",
                p.step_scale
            )));
        }
        if self.max_iterations == 0 || p.max_iterations == 0 {
            return Err(Error::Parameter("iteration count must be positive".into()));
        }
        if !(self.w_floor > 0.0) {
            return Err(Error::Parameter("w_floor must be positive".into()));
        }
        Ok(())
    }

    pub fn with_optimizer(mut self, optimizer: Optimizer) -> Self {
        self.optimizer = optimizer;
        self
    }
}

/// Result of an ℓ₁ trend fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Fit {
    pub lambda: f64,
    pub trend: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `|D₂x̂|`; entry `k` sits at series index `k + 1`.
    pub kink_magnitudes: Vec<f64>,
    pub df_hat: f64,
    pub loss_trace: Vec<f64>,
    pub optimizer: Optimizer,
    pub iterations_run: usize,
    pub converged: bool,
}

/// `½‖y - x‖² + 2λ‖D₂x‖₁`.
pub fn l1_loss(y: &[f64], x: &[f64], lambda: f64) -> f64 {
    let fit: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
    let tv: f64 = x.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).sum();
    0.5 * fit + 2.0 * lambda * tv
}

/// `x - y + 2λD₂ᵀsgn(D₂x)` with `sgn(0) = 0`.
pub fn l1_subgradient(y: &[f64], x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if y.len() != x.len() {
        return Err(Error::Dimension(format!("{} vs {}", y.len(), x.len())));
    }
    let s: Vec<f64> = second_difference(x)?.into_iter().map(sgn).collect();
    let mut g = second_difference_transpose_apply(&s, x.len())?;
    for ((gi, xi), yi) in g.iter_mut().zip(x).zip(y) {
        *gi = *gi * 2.0 * lambda + xi - yi;
    }
    Ok(g)
}

#[inline]
pub(crate) fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn check_positive_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Fit with the optimizer selected in `config`.
///
/// ```
/// use trendbreak::l1::{l1_fit, L1Config, Optimizer};
/// use trendbreak::TimeSeries;
/// // A kink at index 5.
/// let y: Vec<f64> = (0..12).map(|t| if t <= 5 { t as f64 } else { 10.0 - t as f64 }).collect();
/// let cfg = L1Config::default().with_optimizer(Optimizer::Proximal);
/// let fit = l1_fit(&TimeSeries::new(y).unwrap(), 0.05, &cfg).unwrap();
/// let top = fit.kink_magnitudes.iter().enumerate()
///     .max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
/// assert_eq!(top + 1, 5);
/// ```
pub fn l1_fit(y: &TimeSeries, lambda: f64, config: &L1Config) -> Result<L1Fit> {
    match config.optimizer {
        Optimizer::Rprop => l1_fit_rprop(y, lambda, config),
        Optimizer::Proximal => l1_fit_proximal(y, lambda, config),
    }
}

/// Assemble an [`L1Fit`] from a trend, computing magnitudes and df.
pub(crate) fn finish_fit(
    y: &[f64],
    lambda: f64,
    trend: Vec<f64>,
    loss_trace: Vec<f64>,
    optimizer: Optimizer,
    converged: bool,
    w_floor: f64,
) -> Result<L1Fit> {
    let kink_magnitudes: Vec<f64> = second_difference(&trend)?.iter().map(|v| v.abs()).collect();
    let df_hat = df::df_from_magnitudes(&kink_magnitudes, lambda, w_floor)?;
    let residuals = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    Ok(L1Fit {
        lambda,
        iterations_run: loss_trace.len(),
        trend,
        residuals,
        kink_magnitudes,
        df_hat,
        loss_trace,
        optimizer,
        converged,
    })
}
