//! Hodrick–Prescott trend fit and residual confidence-interval detection.
//!
//! The fit is `x̂ = M⁻¹y` with `M = I + 2λD₂ᵀD₂`. Residuals `ê = y - x̂` equal
//! `2λM⁻¹D₂ᵀD₂y`, a linear function of the second differences of `y`, so their
//! covariance follows from the covariance assumed for `D₂y`. An index whose
//! residual falls outside the `1 - α` normal band is flagged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{second_difference, second_difference_transpose_apply, PentaMatrix};
use crate::report::{ChangePointReport, Diagnostics, LambdaScanTable, Method};
use crate::series::TimeSeries;
use crate::stats::{self, merge_adjacent, normal};

/// Assumed covariance of the second differences `D₂y` under no change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceModel {
    /// `Var(D₂y) = σ²·tridiag(-1, 2, -1)`, exact for a random walk with drift:
    /// `(D₂y)_t = ε_{t+1} - ε_t` so neighbouring differences share a shock.
    #[default]
    RandomWalk,
    /// `Var(D₂y) = 2σ²I`, treating the second differences as uncorrelated.
    /// Gives `Var(ê) = 8λ²σ²M⁻¹D₂ᵀD₂M⁻¹`. Much narrower bands than the
    /// random-walk model, so it flags far fewer points.
    Uncorrelated,
}

/// HP trend fit. `sigma2_hat` is the second-difference estimate of the noise
/// variance and stands in for the unknown `σ²` in `residual_variances`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpFit {
    pub lambda: f64,
    pub trend: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_variances: Vec<f64>,
    pub sigma2_hat: f64,
    pub variance_model: VarianceModel,
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Parameter(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// Fit the HP trend with the default [`VarianceModel`].
///
/// ```
/// use trendbreak::{hp::hp_fit, TimeSeries};
/// let y = TimeSeries::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
/// let fit = hp_fit(&y, 10.0).unwrap();
/// // Affine data is reproduced for every λ.
/// assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
/// ```
pub fn hp_fit(y: &TimeSeries, lambda: f64) -> Result<HpFit> {
    hp_fit_with(y, lambda, VarianceModel::default())
}

pub fn hp_fit_with(y: &TimeSeries, lambda: f64, model: VarianceModel) -> Result<HpFit> {
    check_lambda(lambda)?;
    let y = y.values();
    let n = y.len();
    let factor = PentaMatrix::hp(n, lambda)?.factor()?;
    let trend = factor.solve(y);
    let residuals: Vec<f64> = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    let sigma2_hat = stats::sigma2_second_diff(y)?;
    let residual_variances = variance_diag(lambda, sigma2_hat, n, model)?;
    Ok(HpFit {
        lambda,
        trend,
        residuals,
        residual_variances,
        sigma2_hat,
        variance_model: model,
    })
}

/// Residuals from the closed form `2λM⁻¹D₂ᵀD₂y`, independent of the trend solve.
pub fn hp_residuals_closed_form(y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let d = second_difference(y)?;
    let mut r = second_difference_transpose_apply(&d, y.len())?;
    for v in &mut r {
        *v *= 2.0 * lambda;
    }
    solve_hp(&r, lambda)
}

fn solve_hp(b: &[f64], lambda: f64) -> Result<Vec<f64>> {
    Ok(PentaMatrix::hp(b.len(), lambda)?.factor()?.solve(b))
}

/// Diagonal of `8λ²σ²M⁻¹D₂ᵀD₂M⁻¹`, the residual variance when the second
/// differences are taken as uncorrelated with variance `2σ²`.
pub fn hp_residual_variance_diag(lambda: f64, sigma2: f64, n: usize) -> Result<Vec<f64>> {
    variance_diag(lambda, sigma2, n, VarianceModel::Uncorrelated)
}

/// Diagonal of `Var(ê)` under `model`, one banded solve per column of the
/// factor `G` in `Var(ê) = c·M⁻¹GGᵀM⁻¹`; memory stays `O(n)`.
pub fn variance_diag(lambda: f64, sigma2: f64, n: usize, model: VarianceModel) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(Error::Parameter(format!(
            "sigma2 must be non-negative, got {sigma2}"
        )));
    }
    if n < 3 {
        return Err(Error::TooShort { got: n, need: 3 });
    }
    let mut diag = vec![0.0; n];
    if lambda == 0.0 || sigma2 == 0.0 {
        return Ok(diag);
    }
    let factor = PentaMatrix::hp(n, lambda)?.factor()?;
    let (columns, scale) = match model {
        VarianceModel::Uncorrelated => (n - 2, 8.0 * lambda * lambda * sigma2),
        VarianceModel::RandomWalk => (n - 1, 4.0 * lambda * lambda * sigma2),
    };
    let mut g = vec![0.0; n - 2];
    for j in 0..columns {
        g.iter_mut().for_each(|v| *v = 0.0);
        match model {
            VarianceModel::Uncorrelated => g[j] = 1.0,
            // Column j of the first-difference map from shocks to D₂y.
            VarianceModel::RandomWalk => {
                if j < n - 2 {
                    g[j] = -1.0;
                }
                if j >= 1 {
                    g[j - 1] = 1.0;
                }
            }
        }
        let mut col = second_difference_transpose_apply(&g, n)?;
        factor.solve_in_place(&mut col);
        for (d, c) in diag.iter_mut().zip(&col) {
            *d += c * c;
        }
    }
    for d in &mut diag {
        *d *= scale;
    }
    Ok(diag)
}

/// Indices whose residual lies outside `±z_{1-α/2}·sd`; zero-variance
/// indices are never flagged.
pub fn hp_flagged(fit: &HpFit, alpha: f64) -> Result<Vec<usize>> {
    check_alpha(alpha)?;
    let z = normal::quantile(1.0 - alpha / 2.0);
    Ok(fit
        .residuals
        .iter()
        .zip(&fit.residual_variances)
        .enumerate()
        .filter(|(_, (e, v))| **v > 0.0 && e.abs() > z * v.sqrt())
        .map(|(t, _)| t)
        .collect())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Detect change points from an HP fit at level `alpha`.
pub fn hp_detect(y: &TimeSeries, fit: &HpFit, alpha: f64) -> Result<ChangePointReport> {
    let flagged = hp_flagged(fit, alpha)?;
    let n = fit.trend.len();
    let mu = flagged.len() as f64 / n as f64;
    Ok(ChangePointReport {
        method: Method::Hp,
        lambda: Some(fit.lambda),
        alpha: Some(alpha),
        threshold_rule: None,
        penalty: None,
        intervals: merge_adjacent(&flagged),
        flagged_indices: flagged,
        diagnostics: Diagnostics {
            rmse: Some(stats::rmse(y.values(), &fit.trend)?),
            shapiro_p: shapiro_p(&fit.residuals),
            df_hat: None,
            prob: Some(poisson_prob_at_least_one(mu, 1.0)),
            sigma2_hat: Some(fit.sigma2_hat),
        },
        series_length: n,
    })
}

pub(crate) fn shapiro_p(residuals: &[f64]) -> Option<f64> {
    stats::shapiro_wilk(residuals).ok().map(|r| r.p_value)
}

/// `1 - (μh)e^{-μh}`, the probability score used to pick `λ`.
///
/// Note this is not the Poisson `P[N(h) ≥ 1] = 1 - e^{-μh}`: it is 1 at
/// `μ = 0`, dips to `1 - e⁻¹` at `μh = 1` and climbs back towards 1.
pub fn poisson_prob_at_least_one(mu: f64, h: f64) -> f64 {
    let m = mu * h;
    1.0 - m * (-m).exp()
}

/// One row of an HP `λ` scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpLambdaRow {
    pub lambda: f64,
    pub shapiro_p: Option<f64>,
    pub rmse: f64,
    pub log_rmse: f64,
    pub n_detected: usize,
    pub mu_hat: f64,
    pub prob_at_least_one: f64,
}

/// Options for [`hp_lambda_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpScanOptions {
    pub alpha: f64,
    pub prob_threshold: f64,
    pub variance_model: VarianceModel,
}

impl Default for HpScanOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            prob_threshold: 0.95,
            variance_model: VarianceModel::default(),
        }
    }
}

/// Scan `grid` and select the largest `λ` whose probability score reaches
/// `prob_threshold`.
pub fn hp_lambda_scan(
    y: &TimeSeries,
    grid: &[f64],
    opts: HpScanOptions,
) -> Result<LambdaScanTable<HpLambdaRow>> {
    crate::report::check_grid(grid)?;
    check_alpha(opts.alpha)?;
    let n = y.len();
    let rows = grid
        .par_iter()
        .map(|&lambda| {
            let fit = hp_fit_with(y, lambda, opts.variance_model)?;
            let flagged = hp_flagged(&fit, opts.alpha)?;
            let mu_hat = flagged.len() as f64 / n as f64;
            let rmse = stats::rmse(y.values(), &fit.trend)?;
            Ok(HpLambdaRow {
                lambda,
                shapiro_p: shapiro_p(&fit.residuals),
                rmse,
                log_rmse: rmse.ln(),
                n_detected: flagged.len(),
                mu_hat,
                prob_at_least_one: poisson_prob_at_least_one(mu_hat, 1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let selected_lambda = rows
        .iter()
        .rev()
        .find(|r| r.prob_at_least_one >= opts.prob_threshold)
        .map(|r| r.lambda);
    Ok(LambdaScanTable {
        rows,
        selected_lambda,
    })
}
