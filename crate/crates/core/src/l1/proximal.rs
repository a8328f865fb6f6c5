use super::{check_positive_lambda, finish_fit, l1_loss, L1Config, L1Fit, Optimizer};
use crate::error::Result;
use crate::linalg::{dot, second_difference, second_difference_transpose_apply};
use crate::series::TimeSeries;

/// Upper bound on `‖D₂‖²`, which fixes the largest safe dual step.
const D2_NORM_SQ: f64 = 16.0;

/// `sign(z)(|z| - κ)₊` elementwise.
pub fn soft_threshold(z: &[f64], kappa: f64) -> Vec<f64> {
    z.iter()
        .map(|&v| v.signum() * (v.abs() - kappa).max(0.0))
        .collect()
}

/// Accelerated proximal gradient on the dual problem
/// `min_u ½‖y - D₂ᵀu‖²  s.t. ‖u‖∞ ≤ 2λ`, with primal `x = y - D₂ᵀu`.
///
/// The projection onto the box is `w - S(w)` with `S` the soft threshold at
/// `2λ`. Momentum restarts whenever it points against the gradient step. The
/// returned trend is the best primal iterate seen, and `loss_trace` records
/// the best loss so far, so it never increases. Stops when the duality gap
/// drops below `tolerance` relative to the objective.
pub fn l1_fit_proximal(y: &TimeSeries, lambda: f64, config: &L1Config) -> Result<L1Fit> {
    check_positive_lambda(lambda)?;
    config.validate()?;
    let p = config.proximal;
    let y = y.values();
    let n = y.len();
    let bound = 2.0 * lambda;
    let step = p.step_scale / D2_NORM_SQ;
    let half_yy = 0.5 * dot(y, y);

    let mut u = vec![0.0; n - 2];
    let mut v = u.clone();
    let mut momentum = 1.0_f64;
    let mut best_x = y.to_vec();
    let mut best = l1_loss(y, y, lambda);
    let mut trace = Vec::new();
    let mut converged = false;

    for _ in 0..p.max_iterations {
        // Gradient step on the dual at v, then project onto the box.
        let r = primal(y, &v)?;
        let w: Vec<f64> = second_difference(&r)?
            .iter()
            .zip(&v)
            .map(|(g, vi)| vi + step * g)
            .collect();
        let shrunk = soft_threshold(&w, bound);
        let u_next: Vec<f64> = w.iter().zip(&shrunk).map(|(a, b)| a - b).collect();

        let next_momentum = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
        let against: f64 = v
            .iter()
            .zip(&u_next)
            .zip(&u)
            .map(|((vi, un), ui)| (vi - un) * (un - ui))
            .sum();
        if against > 0.0 {
            momentum = 1.0;
            v.clone_from(&u_next);
        } else {
            let beta = (momentum - 1.0) / next_momentum;
            v = u_next
                .iter()
                .zip(&u)
                .map(|(un, ui)| un + beta * (un - ui))
                .collect();
            momentum = next_momentum;
        }
        u = u_next;

        let x = primal(y, &u)?;
        let loss = l1_loss(y, &x, lambda);
        let dual = half_yy - 0.5 * dot(&x, &x);
        if loss < best {
            best = loss;
            best_x = x;
        }
        trace.push(best);
        if best - dual <= p.tolerance * best.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    finish_fit(
        y,
        lambda,
        best_x,
        trace,
        Optimizer::Proximal,
        converged,
        config.w_floor,
    )
}

fn primal(y: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    let mut x = second_difference_transpose_apply(u, y.len())?;
    for (xi, yi) in x.iter_mut().zip(y) {
        *xi = yi - *xi;
    }
    Ok(x)
}
