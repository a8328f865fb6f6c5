//! Change-point detection for random-walk time series.
//!
//! Two trend filters drive the detectors: the Hodrick–Prescott filter
//! ([`hp`]), whose residuals are checked against a normal confidence band,
//! and ℓ₁ trend filtering ([`l1`]), whose sparse kinks are the change
//! points. [`pelt`] provides a change-in-mean baseline and [`evaluation`]
//! runs Monte-Carlo studies on simulated random walks.
//!
//! ```
//! use trendbreak::{hp, TimeSeries};
//!
//! let y = TimeSeries::new(vec![0.0, 5.2, 9.8, 15.1, 20.3, 14.9, 10.2, 5.0, 0.1]).unwrap();
//! let fit = hp::hp_fit(&y, 2.0).unwrap();
//! let report = hp::hp_detect(&y, &fit, 0.05).unwrap();
//! assert_eq!(report.series_length, 9);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluation;
pub mod hp;
pub mod io;
pub mod l1;
pub mod linalg;
pub mod pelt;
pub mod report;
pub mod series;
pub mod stats;

/// Book chapters, compiled so their snippets stay correct.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/second-differences.md")]
    mod second_differences {}
    #[doc = include_str!("../../../book/src/hp-filter.md")]
    mod hp_filter {}
    #[doc = include_str!("../../../book/src/l1-filter.md")]
    mod l1_filter {}
    #[doc = include_str!("../../../book/src/lambda-selection.md")]
    mod lambda_selection {}
    #[doc = include_str!("../../../book/src/pelt.md")]
    mod pelt {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/report-format.md")]
    mod report_format {}
}

pub use error::{Error, Result};
pub use report::{ChangePointReport, Diagnostics, LambdaScanTable, Method};
pub use series::TimeSeries;
pub use stats::Interval;
