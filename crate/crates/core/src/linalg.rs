//! Second-difference operator and the banded solves built on it.
//!
//! Indexing: a series has `n = T + 1` entries indexed `0..n`. The second
//! difference `D₂x` has `n - 2` entries; output index `k` is centred on series
//! index `k + 1`, i.e. `(D₂x)[k] = x[k] - 2 x[k+1] + x[k+2]`. Every module
//! that maps a kink back onto the series uses [`kink_to_series_index`].

use crate::error::{Error, Result};

/// Stencil of one row of `D₂`.
const STENCIL: [f64; 3] = [1.0, -2.0, 1.0];

/// Series index at the centre of second-difference row `k`.
#[inline]
pub fn kink_to_series_index(k: usize) -> usize {
    k + 1
}

/// `D₂x`.
pub fn second_difference(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 3 {
        return Err(Error::Dimension(format!(
            "second difference needs at least 3 values, got {}",
            x.len()
        )));
    }
    Ok(x.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect())
}

/// `D₂ᵀv` for a `D₂` acting on vectors of length `n`; `v` must have length `n - 2`.
pub fn second_difference_transpose_apply(v: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 3 || v.len() + 2 != n {
        return Err(Error::Dimension(format!(
            "D2^T for n = {n} expects {} entries, got {}",
            n.saturating_sub(2),
            v.len()
        )));
    }
    let mut out = vec![0.0; n];
    for (k, &vk) in v.iter().enumerate() {
        out[k] += vk;
        out[k + 1] -= 2.0 * vk;
        out[k + 2] += vk;
    }
    Ok(out)
}

/// Symmetric pentadiagonal matrix stored by its main diagonal and the first
/// two super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct PentaMatrix {
    diag: Vec<f64>,
    off1: Vec<f64>,
    off2: Vec<f64>,
}

impl PentaMatrix {
    pub fn from_diagonals(diag: Vec<f64>, off1: Vec<f64>, off2: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off1.len() != n.saturating_sub(1) || off2.len() != n.saturating_sub(2) {
            return Err(Error::Dimension(format!(
                "diagonal lengths {}/{}/{} are inconsistent",
                n,
                off1.len(),
                off2.len()
            )));
        }
        Ok(Self { diag, off1, off2 })
    }

    /// `I + 2λ D₂ᵀD₂`, the HP smoother system.
    pub fn hp(n: usize, lambda: f64) -> Result<Self> {
        Self::reweighted(n, lambda, &vec![1.0; n.saturating_sub(2)])
    }

    /// `I + 2λ D₂ᵀ diag(w) D₂` with `w` of length `n - 2`.
    pub fn reweighted(n: usize, lambda: f64, w: &[f64]) -> Result<Self> {
        if n < 3 || w.len() + 2 != n {
            return Err(Error::Dimension(format!(
                "weights of length {} for n = {n}",
                w.len()
            )));
        }
        let mut diag = vec![1.0; n];
        let mut off1 = vec![0.0; n - 1];
        let mut off2 = vec![0.0; n - 2];
        for (k, &wk) in w.iter().enumerate() {
            let c = 2.0 * lambda * wk;
            for a in 0..3 {
                diag[k + a] += c * STENCIL[a] * STENCIL[a];
            }
            off1[k] += c * STENCIL[0] * STENCIL[1];
            off1[k + 1] += c * STENCIL[1] * STENCIL[2];
            off2[k] += c * STENCIL[0] * STENCIL[2];
        }
        Ok(Self { diag, off1, off2 })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length must match matrix dimension");
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off1[i] * x[i + 1];
            y[i + 1] += self.off1[i] * x[i];
        }
        for i in 0..n.saturating_sub(2) {
            y[i] += self.off2[i] * x[i + 2];
            y[i + 2] += self.off2[i] * x[i];
        }
        y
    }

    /// Banded `LDLᵀ` factorisation. Fails on a non-positive pivot.
    pub fn factor(&self) -> Result<PentaFactor> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        let mut l2 = vec![0.0; n.saturating_sub(2)];
        for i in 0..n {
            let mut di = self.diag[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > 0.0) || !di.is_finite() {
                return Err(Error::Singular { row: i, pivot: di });
            }
            d[i] = di;
            if i + 1 < n {
                let mut a = self.off1[i];
                if i >= 1 {
                    a -= l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = a / di;
            }
            if i + 2 < n {
                l2[i] = self.off2[i] / di;
            }
        }
        Ok(PentaFactor { d, l1, l2 })
    }
}

/// Factor of a [`PentaMatrix`]; reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct PentaFactor {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl PentaFactor {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        assert_eq!(
            x.len(),
            n,
            "right-hand side length must match matrix dimension"
        );
        for i in 0..n {
            if i >= 1 {
                x[i] -= self.l1[i - 1] * x[i - 1];
            }
            if i >= 2 {
                x[i] -= self.l2[i - 2] * x[i - 2];
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                x[i] -= self.l1[i] * x[i + 1];
            }
            if i + 2 < n {
                x[i] -= self.l2[i] * x[i + 2];
            }
        }
    }
}

/// Solve `M x = b` for a symmetric positive-definite pentadiagonal `M`.
pub fn solve_penta(m: &PentaMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != m.dim() {
        return Err(Error::Dimension(format!(
            "rhs of length {} for a {}x{} system",
            b.len(),
            m.dim(),
            m.dim()
        )));
    }
    Ok(m.factor()?.solve(b))
}

/// The unique `x` of length `d.len() + 2` with `D₂x = d`, `x[0] = x0` and
/// `x[n-1] = x_last`.
pub fn reconstruct_from_second_diff(d: &[f64], x0: f64, x_last: f64) -> Vec<f64> {
    let n = d.len() + 2;
    // Integrate twice with zero initial slope, then add the slope that hits x_last.
    let mut x = Vec::with_capacity(n);
    let mut level = x0;
    let mut slope = 0.0;
    x.push(level);
    for &dk in d {
        level += slope;
        x.push(level);
        slope += dk;
    }
    level += slope;
    x.push(level);
    let v = (x_last - x[n - 1]) / (n - 1) as f64;
    for (t, xt) in x.iter_mut().enumerate() {
        *xt += t as f64 * v;
    }
    x[n - 1] = x_last;
    x
}

/// Least-squares line through `(t, y_t)`, evaluated at each `t`.
pub fn affine_fit(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let y_mean = y.iter().sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for (t, v) in y.iter().enumerate() {
        let dt = t as f64 - t_mean;
        sty += dt * (v - y_mean);
        stt += dt * dt;
    }
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    (0..y.len())
        .map(|t| y_mean + slope * (t as f64 - t_mean))
        .collect()
}

/// Euclidean inner product.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
