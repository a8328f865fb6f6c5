mod common;

use common::walk;
use proptest::prelude::*;
use serde::Deserialize;
use trendbreak::stats::*;

#[derive(Deserialize)]
struct Reference {
    cases: Vec<Case>,
}

#[derive(Deserialize)]
struct Case {
    n: usize,
    kind: String,
    w: f64,
    p_value: f64,
    sample: Vec<f64>,
}

fn reference_cases() -> Vec<(usize, String, f64, f64, Vec<f64>)> {
    let r: Reference = serde_json::from_str(include_str!("data/shapiro_reference.json")).unwrap();
    r.cases
        .into_iter()
        .map(|c| (c.n, c.kind, c.w, c.p_value, c.sample))
        .collect()
}

#[test]
fn shapiro_wilk_matches_reference_values() {
    let cases = reference_cases();
    assert_eq!(cases.len(), 20);
    for (n, kind, w, p, sample) in cases {
        let got = shapiro_wilk(&sample).unwrap();
        assert_eq!(got.n, n);
        assert!(
            (got.w - w).abs() <= 1e-3,
            "{kind} n={n}: W {} vs {w}",
            got.w
        );
        assert!(
            (got.p_value - p).abs() <= 5e-3,
            "{kind} n={n}: p {} vs {p}",
            got.p_value
        );
    }
}

#[test]
fn shapiro_wilk_rejects_bad_samples() {
    assert!(matches!(
        shapiro_wilk(&[1.0, 2.0]),
        Err(trendbreak::Error::SampleTooSmall { got: 2 })
    ));
    assert!(matches!(
        shapiro_wilk(&[3.0; 10]),
        Err(trendbreak::Error::DegenerateSample)
    ));
    assert!(shapiro_wilk(&vec![0.5; MAX_N + 1]).is_err());
}

#[test]
fn normal_quantile_inverts_cdf() {
    for p in [1e-10, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999] {
        assert!(
            (normal::cdf(normal::quantile(p)) - p).abs()
                < 1e-12 * (1.0 + 1.0 / p.min(1.0 - p)).min(1e3)
        );
    }
    assert!((normal::quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
}

#[test]
fn zero_detections_have_zero_fdr() {
    let m = score_detections(&[], &[20, 50], 0).unwrap();
    assert_eq!((m.true_positives, m.false_positives, m.fdr), (0, 0, 0.0));
    assert!(m.per_true_cp_hits.values().all(|h| !h));
}

#[test]
fn each_truth_is_claimed_once() {
    let ivs = [
        Interval::new(19, 20),
        Interval::new(20, 21),
        Interval::new(49, 50),
    ];
    // [19, 20] and [20, 21] overlap, which is rejected.
    assert!(score_detections(&ivs, &[20, 50], 0).is_err());
    let ivs = [
        Interval::new(18, 19),
        Interval::new(20, 21),
        Interval::new(49, 50),
    ];
    let m = score_detections(&ivs, &[20, 50], 1).unwrap();
    assert_eq!(m.true_positives, 2);
    assert_eq!(m.false_positives, 1);
}

fn intervals_strategy() -> impl Strategy<Value = Vec<Interval>> {
    prop::collection::vec((1usize..4, 0usize..3), 0..15).prop_map(|steps| {
        let mut at = 0;
        steps
            .into_iter()
            .map(|(gap, width)| {
                let lo = at + gap;
                at = lo + width + 1;
                Interval::new(lo, lo + width)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shapiro_wilk_is_affine_invariant(seed in any::<u64>(), n in 3usize..300, a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let x = walk(seed, n);
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (wx, wy) = (shapiro_wilk(&x).unwrap().w, shapiro_wilk(&y).unwrap().w);
        prop_assert!((wx - wy).abs() < 1e-10);
        prop_assert!(wx > 0.0 && wx <= 1.0 + 1e-12);
    }

    #[test]
    fn score_invariants(ivs in intervals_strategy(), cps in prop::collection::btree_set(0usize..60, 0..5), slack in 0usize..3) {
        let cps: Vec<usize> = cps.into_iter().collect();
        let m = score_detections(&ivs, &cps, slack).unwrap();
        prop_assert_eq!(m.true_positives + m.false_positives, ivs.len());
        prop_assert!((0.0..=1.0).contains(&m.fdr));
        prop_assert_eq!(m.per_true_cp_hits.values().filter(|h| **h).count(), m.true_positives);
    }

    #[test]
    fn rmse_is_zero_only_on_exact_fit(y in prop::collection::vec(-100f64..100.0, 2..50), shift in prop::collection::vec(-1f64..1.0, 2..50)) {
        let n = y.len().min(shift.len());
        let (y, shift) = (&y[..n], &shift[..n]);
        let trend: Vec<f64> = y.iter().zip(shift).map(|(a, s)| a + s).collect();
        let r = rmse(y, &trend).unwrap();
        prop_assert!(r >= 0.0);
        prop_assert_eq!(r == 0.0, shift.iter().all(|s| *s == 0.0));
        prop_assert_eq!(rmse(y, y).unwrap(), 0.0);
    }
}
