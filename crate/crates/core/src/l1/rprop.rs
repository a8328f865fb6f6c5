use super::{
    check_positive_lambda, finish_fit, l1_loss, l1_subgradient, sgn, L1Config, L1Fit, Optimizer,
};
use crate::error::Result;
use crate::linalg::dot;
use crate::series::TimeSeries;

/// Iterations over which the relative loss change decides `converged`.
const WINDOW: usize = 10;

/// RPROP with a single step size adapted from the inner product of
/// consecutive subgradients. A reversal (negative product) shrinks the step
/// and zeroes the gradient, so that iteration moves nothing.
pub fn l1_fit_rprop(y: &TimeSeries, lambda: f64, config: &L1Config) -> Result<L1Fit> {
    check_positive_lambda(lambda)?;
    config.validate()?;
    let p = config.rprop;
    let y = y.values();
    let mut x = y.to_vec();
    let mut prev = vec![0.0; y.len()];
    let mut step = p.step_init;
    let mut trace = Vec::with_capacity(config.max_iterations);
    for _ in 0..config.max_iterations {
        let mut g = l1_subgradient(y, &x, lambda)?;
        let agreement = dot(&g, &prev);
        if agreement > 0.0 {
            step = (step * p.eta_plus).min(p.step_max);
        } else if agreement < 0.0 {
            step = (step * p.eta_minus).max(p.step_min);
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * sgn(*gi);
        }
        prev = g;
        trace.push(l1_loss(y, &x, lambda));
    }
    let converged = trace.len() > WINDOW && {
        let last = trace[trace.len() - 1];
        let before = trace[trace.len() - 1 - WINDOW];
        (last - before).abs() <= 1e-6 * before.abs().max(f64::MIN_POSITIVE)
    };
    finish_fit(
        y,
        lambda,
        x,
        trace,
        Optimizer::Rprop,
        converged,
        config.w_floor,
    )
}
