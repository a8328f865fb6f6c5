//! Dense reference implementations used as test oracles.
#![allow(dead_code)]

pub type Dense = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// `(n-2) x n` second-difference matrix.
pub fn d2(n: usize) -> Dense {
    (0..n - 2)
        .map(|k| {
            let mut row = vec![0.0; n];
            row[k] = 1.0;
            row[k + 1] = -2.0;
            row[k + 2] = 1.0;
            row
        })
        .collect()
}

/// `(n-1) x n` first-difference matrix.
pub fn d1(n: usize) -> Dense {
    (0..n - 1)
        .map(|k| {
            let mut row = vec![0.0; n];
            row[k] = -1.0;
            row[k + 1] = 1.0;
            row
        })
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn add(a: &Dense, b: &Dense, scale: f64) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(p, q)| p + scale * q).collect())
        .collect()
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        assert!(p.abs() > 1e-300, "singular oracle matrix");
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for i in 0..n {
            if i != col {
                let f = m[i][col];
                if f != 0.0 {
                    let pivot_row = m[col].clone();
                    for (v, pv) in m[i].iter_mut().zip(pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Dense `I + 2λD₂ᵀD₂`.
pub fn hp_matrix(n: usize, lambda: f64) -> Dense {
    let d = d2(n);
    add(&identity(n), &matmul(&transpose(&d), &d), 2.0 * lambda)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|q| q * q).sum::<f64>().sqrt().max(1.0);
    num / den
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// Deterministic pseudo-random walk for tests that need a fixed series.
pub fn walk(seed: u64, n: usize) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut y = Vec::with_capacity(n);
    let mut level = 0.0;
    for _ in 0..n {
        level += 1.0 + 3.0 * (rng.random::<f64>() - 0.5);
        y.push(level);
    }
    y
}

fn sse(y: &[f64]) -> f64 {
    let m = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Exhaustive search over admissible breakpoint sets. Returns the optimal
/// objective and one optimal set of change points (last index of each
/// segment but the final one).
pub fn brute_force_segmentation(
    y: &[f64],
    penalty: f64,
    min_size: usize,
    jump: usize,
) -> (f64, Vec<usize>) {
    let n = y.len();
    let candidates: Vec<usize> = (1..n)
        .filter(|&b| b % jump == 0 && b >= min_size && b + min_size <= n)
        .collect();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << candidates.len()) {
        let mut bounds = vec![0];
        bounds.extend(
            candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &b)| b),
        );
        bounds.push(n);
        if bounds.windows(2).any(|w| w[1] - w[0] < min_size) {
            continue;
        }
        let obj: f64 = bounds.windows(2).map(|w| sse(&y[w[0]..w[1]])).sum::<f64>()
            + penalty * (bounds.len() - 2) as f64;
        if obj < best.0 - 1e-12 {
            best = (
                obj,
                bounds[1..bounds.len() - 1].iter().map(|b| b - 1).collect(),
            );
        }
    }
    best
}

/// Objective of a given segmentation.
pub fn segmentation_objective(y: &[f64], change_points: &[usize], penalty: f64) -> f64 {
    let mut bounds = vec![0];
    bounds.extend(change_points.iter().map(|c| c + 1));
    bounds.push(y.len());
    bounds.windows(2).map(|w| sse(&y[w[0]..w[1]])).sum::<f64>()
        + penalty * change_points.len() as f64
}
