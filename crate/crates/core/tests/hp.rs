mod common;

use common::*;
use proptest::prelude::*;
use trendbreak::hp::*;
use trendbreak::linalg::second_difference;
use trendbreak::TimeSeries;

fn ts(v: Vec<f64>) -> TimeSeries {
    TimeSeries::new(v).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn trend_matches_dense_inverse() {
    let y = walk(11, 10);
    let fit = hp_fit(&ts(y.clone()), 2.0).unwrap();
    let oracle = matvec(&inverse(&hp_matrix(10, 2.0)), &y);
    assert!(max_abs_diff(&fit.trend, &oracle) < 1e-9);
}

fn dense_variance(n: usize, lambda: f64, sigma2: f64, model: VarianceModel) -> Vec<f64> {
    let minv = inverse(&hp_matrix(n, lambda));
    let d = d2(n);
    let cov_d2y = match model {
        VarianceModel::RandomWalk => {
            let d1m = d1(n - 1);
            matmul(&d1m, &transpose(&d1m))
        }
        VarianceModel::Uncorrelated => add(&identity(n - 2), &identity(n - 2), 1.0),
    };
    let a = matmul(&minv, &transpose(&d));
    let v = matmul(&matmul(&a, &cov_d2y), &transpose(&a));
    (0..n)
        .map(|i| 4.0 * lambda * lambda * sigma2 * v[i][i])
        .collect()
}

#[test]
fn residual_variance_matches_dense_oracle() {
    for model in [VarianceModel::RandomWalk, VarianceModel::Uncorrelated] {
        for (n, lambda) in [(8, 1.0), (12, 13.0), (21, 100.0)] {
            let got = variance_diag(lambda, 2.5, n, model).unwrap();
            let want = dense_variance(n, lambda, 2.5, model);
            assert!(
                max_abs_diff(&got, &want) < 1e-9,
                "{model:?} n={n} λ={lambda}"
            );
        }
    }
    let literal = hp_residual_variance_diag(5.0, 1.5, 15).unwrap();
    let want = dense_variance(15, 5.0, 1.5, VarianceModel::Uncorrelated);
    assert!(max_abs_diff(&literal, &want) < 1e-9);
}

#[test]
fn residual_variance_is_time_symmetric() {
    for model in [VarianceModel::RandomWalk, VarianceModel::Uncorrelated] {
        let v = variance_diag(3.0, 1.0, 8, model).unwrap();
        for t in 0..8 {
            assert!((v[t] - v[7 - t]).abs() < 1e-12);
        }
    }
}

#[test]
fn closed_form_residuals_match_dense_on_short_series() {
    for t in [4usize, 9, 20] {
        let y = walk(t as u64, t + 1);
        for lambda in [0.5, 2.0, 13.0] {
            let fast = hp_residuals_closed_form(&y, lambda).unwrap();
            let minv = inverse(&hp_matrix(t + 1, lambda));
            let d = d2(t + 1);
            let dtd = matmul(&transpose(&d), &d);
            let dense: Vec<f64> = matvec(&matmul(&minv, &dtd), &y)
                .iter()
                .map(|v| 2.0 * lambda * v)
                .collect();
            assert!(max_abs_diff(&fast, &dense) < 1e-9);
        }
    }
}

#[test]
fn huge_lambda_tends_to_ols_line() {
    let y = walk(5, 40);
    // Conditioning grows like 16λ, so stay well below 1/ε.
    let fit = hp_fit(&ts(y.clone()), 1e8).unwrap();
    let line = trendbreak::linalg::affine_fit(&y);
    assert!(max_abs_diff(&fit.trend, &line) < 1e-3);
}

#[test]
fn never_flags_zero_variance() {
    let y = ts(walk(3, 30));
    let mut fit = hp_fit(&y, 5.0).unwrap();
    fit.residual_variances
        .iter_mut()
        .step_by(2)
        .for_each(|v| *v = 0.0);
    let flagged = hp_flagged(&fit, 0.9).unwrap();
    assert!(flagged.iter().all(|&t| t % 2 == 1));
}

#[test]
fn probability_score_shape() {
    assert_eq!(poisson_prob_at_least_one(0.0, 1.0), 1.0);
    let dip = poisson_prob_at_least_one(1.0, 1.0);
    assert!((dip - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    assert!(poisson_prob_at_least_one(0.05, 1.0) > 0.95);
}

#[test]
fn scan_selects_largest_passing_lambda() {
    let y = ts(walk(17, 100));
    let grid: Vec<f64> = (1..=40).map(f64::from).collect();
    let scan = hp_lambda_scan(&y, &grid, HpScanOptions::default()).unwrap();
    assert_eq!(scan.rows.len(), 40);
    assert!(scan.rows.windows(2).all(|w| w[0].lambda < w[1].lambda));
    if let Some(sel) = scan.selected_lambda {
        let row = scan.rows.iter().find(|r| r.lambda == sel).unwrap();
        assert!(row.prob_at_least_one >= 0.95);
        assert!(scan
            .rows
            .iter()
            .filter(|r| r.lambda > sel)
            .all(|r| r.prob_at_least_one < 0.95));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_identity(seed in any::<u64>(), n in 5usize..120, lambda in prop::sample::select(vec![1.0, 13.0, 100.0])) {
        let y = walk(seed, n);
        let fit = hp_fit(&ts(y.clone()), lambda).unwrap();
        let direct: Vec<f64> = y.iter().zip(&fit.trend).map(|(a, b)| a - b).collect();
        let closed = hp_residuals_closed_form(&y, lambda).unwrap();
        prop_assert!(rel_err(&closed, &direct) < 1e-8);
    }

    #[test]
    fn trend_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -10f64..10.0, n in 5usize..80, lambda in 0f64..500.0) {
        let y1 = walk(s1, n);
        let y2 = walk(s2, n);
        let mix: Vec<f64> = y1.iter().zip(&y2).map(|(p, q)| a * p + q).collect();
        let t1 = hp_fit(&ts(y1), lambda).unwrap().trend;
        let t2 = hp_fit(&ts(y2), lambda).unwrap().trend;
        let tm = hp_fit(&ts(mix), lambda).unwrap().trend;
        let combo: Vec<f64> = t1.iter().zip(&t2).map(|(p, q)| a * p + q).collect();
        prop_assert!(max_abs_diff(&tm, &combo) < 1e-9 * (1.0 + norm(&combo)));
    }

    #[test]
    fn affine_series_is_reproduced(a in -100f64..100.0, b in -10f64..10.0, n in 5usize..100, lambda in 0f64..1e4) {
        let y: Vec<f64> = (0..n).map(|t| a + b * t as f64).collect();
        let fit = hp_fit(&ts(y.clone()), lambda).unwrap();
        prop_assert!(max_abs_diff(&fit.trend, &y) < 1e-7 * (1.0 + a.abs() + b.abs() * n as f64));
    }

    #[test]
    fn smoothing_is_monotone(seed in any::<u64>(), n in 5usize..100, l1 in 0f64..200.0, dl in 0f64..200.0) {
        let y = ts(walk(seed, n));
        let r1 = norm(&second_difference(&hp_fit(&y, l1).unwrap().trend).unwrap());
        let r2 = norm(&second_difference(&hp_fit(&y, l1 + dl).unwrap().trend).unwrap());
        prop_assert!(r2 <= r1 * (1.0 + 1e-9) + 1e-12);
    }
}
