mod common;

use common::*;
use proptest::prelude::*;
use trendbreak::linalg::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(200)
}

#[test]
fn penta_solve_matches_dense_oracle() {
    let n = 6;
    let b = [1.0, -2.0, 0.5, 3.0, 0.0, 4.0];
    let x = solve_penta(&PentaMatrix::hp(n, 1.0).unwrap(), &b).unwrap();
    let oracle = matvec(&inverse(&hp_matrix(n, 1.0)), &b);
    assert!(max_abs_diff(&x, &oracle) < 1e-12, "{x:?} vs {oracle:?}");
}

#[test]
fn reweighted_matrix_matches_dense() {
    let n = 9;
    let w = [0.5, 2.0, 1.0, 3.0, 0.1, 1.5, 4.0];
    let m = PentaMatrix::reweighted(n, 0.7, &w).unwrap();
    let d = d2(n);
    let wd: Dense = d
        .iter()
        .zip(&w)
        .map(|(r, wk)| r.iter().map(|v| v * wk).collect())
        .collect();
    let dense = add(&identity(n), &matmul(&transpose(&d), &wd), 1.4);
    let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
    assert!(max_abs_diff(&m.mul_vec(&x), &matvec(&dense, &x)) < 1e-12);
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn solve_then_multiply_reproduces_rhs(
        y in prop::collection::vec(-1e3f64..1e3, 5..150),
        log_lambda in -3f64..6.0,
    ) {
        let lambda = 10f64.powf(log_lambda);
        let m = PentaMatrix::hp(y.len(), lambda).unwrap();
        let x = solve_penta(&m, &y).unwrap();
        prop_assert!(rel_err(&m.mul_vec(&x), &y) < 1e-8);
    }

    #[test]
    fn adjoint_identity(
        x in prop::collection::vec(-100f64..100.0, 3..80),
        seed in any::<u64>(),
    ) {
        let n = x.len();
        let v = walk(seed, n - 2);
        let lhs: f64 = second_difference(&x).unwrap().iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = second_difference_transpose_apply(&v, n).unwrap().iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn affine_inputs_are_annihilated(a in -50f64..50.0, b in -5f64..5.0, n in 3usize..100) {
        let x: Vec<f64> = (0..n).map(|t| a + b * t as f64).collect();
        let d = second_difference(&x).unwrap();
        prop_assert!(d.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn non_affine_inputs_are_not_annihilated(
        a in -50f64..50.0,
        b in -5f64..5.0,
        n in 3usize..100,
        bump in 0.5f64..10.0,
        at_frac in 0f64..1.0,
    ) {
        let at = ((n - 1) as f64 * at_frac) as usize;
        let mut x: Vec<f64> = (0..n).map(|t| a + b * t as f64).collect();
        x[at] += bump;
        let d = second_difference(&x).unwrap();
        prop_assert!(d.iter().any(|v| v.abs() > 1e-6));
    }

    #[test]
    fn reconstruction_round_trip(x in prop::collection::vec(-1e3f64..1e3, 3..120)) {
        let n = x.len();
        let back = reconstruct_from_second_diff(&second_difference(&x).unwrap(), x[0], x[n - 1]);
        prop_assert!(max_abs_diff(&back, &x) < 1e-6 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
    }
}

#[test]
fn affine_fit_recovers_line() {
    let y: Vec<f64> = (0..20).map(|t| 3.0 - 0.5 * t as f64).collect();
    assert!(max_abs_diff(&affine_fit(&y), &y) < 1e-12);
}
