use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{l1_fit, L1Config};
use crate::error::{Error, Result};
use crate::hp::{check_alpha, shapiro_p};
use crate::linalg::affine_fit;
use crate::report::{check_grid, LambdaScanTable};
use crate::series::TimeSeries;
use crate::stats;

/// Smallest admissible `λ` under the no-change null: `1 / ((T - 1)σ)`.
pub fn l1_lambda_lower_bound(sigma: f64, t: usize) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if t < 2 {
        return Err(Error::Parameter(format!("need T >= 2, got {t}")));
    }
    Ok(1.0 / ((t - 1) as f64 * sigma))
}

/// Residual scale of the `λ → ∞` fit, which is the least-squares line.
pub fn large_lambda_sigma(y: &TimeSeries) -> Result<f64> {
    let line = affine_fit(y.values());
    Ok(stats::sigma2_residual_mse(y.values(), &line)?.sqrt())
}

/// Residuals divided by `sqrt(Σê²/T)`.
pub fn standardize_residuals(residuals: &[f64]) -> Vec<f64> {
    let t = residuals.len().saturating_sub(1).max(1) as f64;
    let scale = (residuals.iter().map(|e| e * e).sum::<f64>() / t).sqrt();
    if scale > 0.0 {
        residuals.iter().map(|e| e / scale).collect()
    } else {
        residuals.to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1LambdaRow {
    pub lambda: f64,
    pub shapiro_p: Option<f64>,
    pub rmse: f64,
    pub log_rmse: f64,
    pub df_hat: f64,
    pub lower_bound_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1ScanOptions {
    pub alpha: f64,
    pub config: L1Config,
}

impl Default for L1ScanOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            config: L1Config::default(),
        }
    }
}

/// Scan `grid` and select the smallest `λ` whose standardized residuals pass
/// Shapiro–Wilk at `alpha` and which respects the lower bound.
pub fn l1_lambda_scan(
    y: &TimeSeries,
    grid: &[f64],
    opts: &L1ScanOptions,
) -> Result<LambdaScanTable<L1LambdaRow>> {
    check_grid(grid)?;
    check_alpha(opts.alpha)?;
    if grid[0] <= 0.0 {
        return Err(Error::Parameter("l1 lambda grid must be positive".into()));
    }
    let bound = l1_lambda_lower_bound(large_lambda_sigma(y)?, y.last_index())?;
    let rows = grid
        .par_iter()
        .map(|&lambda| {
            let fit = l1_fit(y, lambda, &opts.config)?;
            let rmse = stats::rmse(y.values(), &fit.trend)?;
            Ok(L1LambdaRow {
                lambda,
                shapiro_p: shapiro_p(&standardize_residuals(&fit.residuals)),
                rmse,
                log_rmse: rmse.ln(),
                df_hat: fit.df_hat,
                lower_bound_ok: lambda >= bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let selected_lambda = rows
        .iter()
        .find(|r| r.lower_bound_ok && r.shapiro_p.is_some_and(|p| p > opts.alpha))
        .map(|r| r.lambda);
    Ok(LambdaScanTable {
        rows,
        selected_lambda,
    })
}
