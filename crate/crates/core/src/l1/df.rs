use super::L1Fit;
use crate::error::{Error, Result};
use crate::hp::check_lambda;
use crate::linalg::PentaMatrix;

/// Degrees of freedom of the fit, read as the number of effective kinks.
///
/// Linearising the fit around `x̂` gives the smoother
/// `H = (I + 2λD₂ᵀW⁻¹D₂)⁻¹` with `W = diag(max(|D₂x̂|, floor))`. Kinks that
/// are (numerically) absent get a huge weight and are locked to zero, so `H`
/// projects onto piecewise-linear sequences with kinks only where `D₂x̂ ≠ 0`.
/// That space has dimension `kinks + 2`; the two affine directions carry no
/// change point, so `df = tr(H) - 2`, clamped to `[0, T - 1]`. With `λ = 0`
/// every interior index counts.
pub fn l1_df(fit: &L1Fit, lambda: f64) -> Result<f64> {
    l1_df_with_floor(fit, lambda, 1e-8)
}

pub fn l1_df_with_floor(fit: &L1Fit, lambda: f64, w_floor: f64) -> Result<f64> {
    df_from_magnitudes(&fit.kink_magnitudes, lambda, w_floor)
}

pub(crate) fn df_from_magnitudes(magnitudes: &[f64], lambda: f64, w_floor: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(w_floor > 0.0) {
        return Err(Error::Parameter("w_floor must be positive".into()));
    }
    let n = magnitudes.len() + 2;
    let weights: Vec<f64> = magnitudes.iter().map(|m| 1.0 / m.max(w_floor)).collect();
    let factor = PentaMatrix::reweighted(n, lambda, &weights)?.factor()?;
    let mut trace = 0.0;
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        factor.solve_in_place(&mut e);
        trace += e[j];
    }
    Ok((trace - 2.0).clamp(0.0, (n - 2) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_counts_every_interior_point() {
        let m = vec![1.0; 98];
        assert!((df_from_magnitudes(&m, 0.0, 1e-8).unwrap() - 98.0).abs() < 1e-12);
    }

    #[test]
    fn affine_fit_has_no_kinks() {
        let m = vec![0.0; 30];
        assert!(df_from_magnitudes(&m, 1.0, 1e-8).unwrap() < 1e-3);
    }

    #[test]
    fn isolated_kinks_are_counted() {
        let mut m = vec![0.0; 40];
        m[10] = 3.0;
        m[25] = 1.5;
        let df = df_from_magnitudes(&m, 1.0, 1e-8).unwrap();
        // Between 0 and the kink count: the two free kinks are only partly shrunk.
        assert!(df > 0.5 && df < 2.0 + 1e-6, "{df}");
    }
}
