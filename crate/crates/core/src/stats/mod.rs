//! Normality testing, variance estimators and detection metrics.

mod metrics;
pub mod normal;
mod shapiro;

pub use metrics::{
    merge_adjacent, rmse, score_detections, sigma2_residual_mse, sigma2_second_diff,
    validate_intervals, DetectionMetrics, Interval,
};
pub use shapiro::{shapiro_wilk, NormalityResult, MAX_N};
