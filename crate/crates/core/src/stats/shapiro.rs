//! Shapiro–Wilk W test with Royston's (1995, AS R94) approximations.

use serde::{Deserialize, Serialize};

use super::normal;
use crate::error::{Error, Result};

/// Largest sample the approximation is calibrated for.
pub const MAX_N: usize = 5000;

/// Outcome of [`shapiro_wilk`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub w: f64,
    pub p_value: f64,
    pub n: usize,
}

const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_19, 4.434_685, -2.706_056];
const C2: [f64; 6] = [
    0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633,
];
const C3: [f64; 4] = [0.544, -0.399_78, 0.025_054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.778_57, 0.062_767, -0.002_032_2];
const C5: [f64; 4] = [-1.5861, -0.310_82, -0.083_751, 0.003_891_5];
const C6: [f64; 3] = [-0.4803, -0.082_676, 0.003_030_2];
const G: [f64; 2] = [-2.273, 0.459];
const SMALL_P: f64 = 1e-19;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Coefficients for the lower half of the ordered sample, all positive.
fn half_coefficients(n: usize) -> Vec<f64> {
    let nn2 = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an25 = n as f64 + 0.25;
    let mut m: Vec<f64> = (0..nn2)
        .map(|i| normal::quantile((i as f64 + 1.0 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let num = summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1];
        let den = 1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2;
        m[1] = a2;
        (2, (num / den).sqrt())
    } else {
        let num = summ2 - 2.0 * m[0] * m[0];
        let den = 1.0 - 2.0 * a1 * a1;
        (1, (num / den).sqrt())
    };
    m[0] = a1;
    for v in &mut m[first_scaled..] {
        *v = -*v / fac;
    }
    m
}

/// Shapiro–Wilk test of `sample` against normality.
///
/// ```
/// use trendbreak::stats::shapiro_wilk;
/// let r = shapiro_wilk(&[2.1, 3.4, 1.9, 5.6, 4.4, 3.0, 2.8, 3.9]).unwrap();
/// assert!(r.w > 0.9 && r.p_value > 0.05);
/// ```
pub fn shapiro_wilk(sample: &[f64]) -> Result<NormalityResult> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::SampleTooSmall { got: n });
    }
    if n > MAX_N {
        return Err(Error::SampleTooLarge { got: n });
    }
    if let Some(i) = sample.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if !(range > 0.0) {
        return Err(Error::DegenerateSample);
    }

    let half = half_coefficients(n);
    let coef = |i: usize| -> f64 {
        let j = n - 1 - i;
        if i < j {
            -half[i]
        } else if i > j {
            half[j]
        } else {
            0.0
        }
    };

    // W as the squared correlation of the ordered sample with the coefficients.
    let xs: Vec<f64> = x.iter().map(|v| v / range).collect();
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_a = (0..n).map(coef).sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in xs.iter().enumerate() {
        let da = coef(i) - mean_a;
        let dx = xi - mean_x;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let root = (ssa * ssx).sqrt();
    let w1 = ((root - sax) * (root + sax) / (ssa * ssx)).max(0.0);
    let w = 1.0 - w1;

    let p_value = if n == 3 {
        let w = w.max(0.75);
        (1.0 - 6.0 / std::f64::consts::PI * w.sqrt().acos()).clamp(0.0, 1.0)
    } else if w1 == 0.0 {
        1.0
    } else if n <= 11 {
        let an = n as f64;
        let gamma = poly(&G, an);
        let y = w1.ln();
        if y >= gamma {
            SMALL_P
        } else {
            let y = -(gamma - y).ln();
            let m = poly(&C3, an);
            let s = poly(&C4, an).exp();
            normal::upper_tail((y - m) / s)
        }
    } else {
        let ln_n = (n as f64).ln();
        let m = poly(&C5, ln_n);
        let s = poly(&C6, ln_n).exp();
        normal::upper_tail((w1.ln() - m) / s)
    };

    Ok(NormalityResult {
        w: if n == 3 { w.max(0.75) } else { w },
        p_value,
        n,
    })
}
