//! Random-walk scenarios and Monte-Carlo studies of the detectors.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{hp_detect, hp_fit_with, VarianceModel};
use crate::l1::{l1_detect, l1_fit, l1_lambda_scan, L1Config, L1ScanOptions, ThresholdRule};
use crate::pelt::{pelt_detect, PeltConfig};
use crate::report::ChangePointReport;
use crate::series::TimeSeries;
use crate::stats::score_detections;

/// Drift `drift` applies to indices `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub drift: f64,
}

/// `y_0 = ε_0`, `y_t = β_{k(t)} + y_{t-1} + ε_t` with `ε_t ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub segments: Vec<Segment>,
    pub sigma: f64,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>, sigma: f64) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            segments,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// One segment of drift 5 over `t = 0..=99`, `σ = 5`.
    pub fn no_change() -> Self {
        Self {
            name: "no-cp".into(),
            segments: vec![Segment {
                start: 0,
                end: 99,
                drift: 5.0,
            }],
            sigma: 5.0,
        }
    }

    /// Drifts 5, -5, 5 switching after `t = 20` and `t = 50`; `t = 0..=100`, `σ = 5`.
    pub fn two_changes() -> Self {
        let seg = |start, end, drift| Segment { start, end, drift };
        Self {
            name: "two-cp".into(),
            segments: vec![seg(0, 20, 5.0), seg(21, 50, -5.0), seg(51, 100, 5.0)],
            sigma: 5.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Parameter("scenario has no segments".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Parameter(format!(
                "sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        let mut next = 0;
        for s in &self.segments {
            if s.start != next || s.end < s.start || !s.drift.is_finite() {
                return Err(Error::Parameter(format!(
                    "segments must tile 0..=T without gaps: bad segment {}..={}",
                    s.start, s.end
                )));
            }
            next = s.end + 1;
        }
        Ok(())
    }

    /// Number of observations `T + 1`.
    pub fn len(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Last index of every segment but the final one.
    pub fn true_change_points(&self) -> Vec<usize> {
        self.segments[..self.segments.len() - 1]
            .iter()
            .map(|s| s.end)
            .collect()
    }

    fn drift_at(&self, t: usize) -> f64 {
        self.segments
            .iter()
            .find(|s| s.start <= t && t <= s.end)
            .map_or(0.0, |s| s.drift)
    }
}

/// Simulate the scenario. Shocks come from ChaCha8 seeded with `seed`, so a
/// `(spec, seed)` pair always yields the same series.
///
/// ```
/// use trendbreak::evaluation::{simulate_random_walk, ScenarioSpec, Segment};
/// let spec = ScenarioSpec::new("flat", vec![Segment { start: 0, end: 4, drift: 5.0 }], 0.0).unwrap();
/// assert_eq!(simulate_random_walk(&spec, 7).unwrap().values(), &[0.0, 5.0, 10.0, 15.0, 20.0]);
/// ```
pub fn simulate_random_walk(spec: &ScenarioSpec, seed: u64) -> Result<TimeSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let n = spec.len();
    let mut y = Vec::with_capacity(n);
    y.push(noise.sample(&mut rng));
    for t in 1..n {
        let prev = y[t - 1];
        y.push(spec.drift_at(t) + prev + noise.sample(&mut rng));
    }
    TimeSeries::new(y)
}

/// How the ℓ₁ penalty is chosen in each replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum L1Lambda {
    Fixed(f64),
    /// Scan the grid per replication; fall back to the largest value when
    /// nothing passes.
    Scan {
        grid: Vec<f64>,
        alpha: f64,
    },
}

/// A detector and its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum StudyMethod {
    Hp {
        lambda: f64,
        alpha: f64,
        variance_model: VarianceModel,
    },
    L1 {
        lambda: L1Lambda,
        rule: ThresholdRule,
        config: L1Config,
    },
    Pelt(PeltConfig),
}

impl StudyMethod {
    pub fn hp(lambda: f64) -> Self {
        StudyMethod::Hp {
            lambda,
            alpha: 0.05,
            variance_model: VarianceModel::default(),
        }
    }

    pub fn l1(lambda: f64, rule: ThresholdRule) -> Self {
        StudyMethod::L1 {
            lambda: L1Lambda::Fixed(lambda),
            rule,
            config: L1Config::default(),
        }
    }

    pub fn pelt() -> Self {
        StudyMethod::Pelt(PeltConfig::default())
    }

    /// Short name used in tables, e.g. `l1[top-k:2]`.
    pub fn label(&self) -> String {
        match self {
            StudyMethod::Hp { .. } => "hp".into(),
            StudyMethod::L1 { rule, .. } => format!("l1[{rule}]"),
            StudyMethod::Pelt(_) => "pelt".into(),
        }
    }

    /// Detect on one series.
    pub fn detect(&self, y: &TimeSeries) -> Result<ChangePointReport> {
        match self {
            StudyMethod::Hp {
                lambda,
                alpha,
                variance_model,
            } => hp_detect(y, &hp_fit_with(y, *lambda, *variance_model)?, *alpha),
            StudyMethod::L1 {
                lambda,
                rule,
                config,
            } => {
                let lambda = match lambda {
                    L1Lambda::Fixed(l) => *l,
                    L1Lambda::Scan { grid, alpha } => {
                        let opts = L1ScanOptions {
                            alpha: *alpha,
                            config: *config,
                        };
                        let scan = l1_lambda_scan(y, grid, &opts)?;
                        scan.selected_lambda.unwrap_or(grid[grid.len() - 1])
                    }
                };
                l1_detect(y, &l1_fit(y, lambda, config)?, *rule)
            }
            StudyMethod::Pelt(cfg) => pelt_detect(y, cfg),
        }
    }
}

/// Summary statistics of detection counts. Quartiles use the lower
/// nearest rank, so they are always observed values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountStats {
    pub mean: f64,
    pub std: f64,
    pub min: usize,
    pub q25: usize,
    pub median: usize,
    pub q75: usize,
    pub max: usize,
}

/// Mean, sample standard deviation, extremes and quartiles of `counts`.
///
/// ```
/// use trendbreak::evaluation::summarize_counts;
/// let s = summarize_counts(&[1, 2, 3, 4]).unwrap();
/// assert_eq!((s.q25, s.median, s.q75), (1, 2, 3));
/// ```
pub fn summarize_counts(counts: &[usize]) -> Result<CountStats> {
    if counts.is_empty() {
        return Err(Error::Parameter("no counts to summarize".into()));
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mean = sorted.iter().sum::<usize>() as f64 / n as f64;
    let std = if n > 1 {
        let ss: f64 = sorted.iter().map(|&c| (c as f64 - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let rank = |p: f64| sorted[((p * n as f64).ceil() as usize).clamp(1, n) - 1];
    Ok(CountStats {
        mean,
        std,
        min: sorted[0],
        q25: rank(0.25),
        median: rank(0.5),
        q75: rank(0.75),
        max: sorted[n - 1],
    })
}

/// Outcome of one method on one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub seed: u64,
    pub method: String,
    pub detected: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub fdr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub counts: CountStats,
    /// Replications in which each true change point was detected.
    pub true_positive_totals: BTreeMap<usize, usize>,
    pub mean_fdr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub scenario: ScenarioSpec,
    pub replications: usize,
    pub seed: u64,
    pub match_slack: usize,
    pub methods: Vec<StudyMethod>,
    pub summaries: Vec<MethodSummary>,
    pub records: Vec<ReplicationRecord>,
}

/// Run every method on `replications` simulated series; replication `r`
/// uses seed `base_seed + r`. Replications run in parallel and are joined in
/// order, so the result does not depend on scheduling.
pub fn run_study(
    spec: &ScenarioSpec,
    methods: &[StudyMethod],
    replications: usize,
    base_seed: u64,
    match_slack: usize,
) -> Result<SimulationSummary> {
    spec.validate()?;
    if replications == 0 {
        return Err(Error::Parameter("need at least one replication".into()));
    }
    if methods.is_empty() {
        return Err(Error::Parameter("no methods to run".into()));
    }
    let truth = spec.true_change_points();
    let per_rep: Vec<Vec<(ReplicationRecord, BTreeMap<usize, bool>)>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let seed = base_seed.wrapping_add(r as u64);
            let y = simulate_random_walk(spec, seed)?;
            methods
                .iter()
                .map(|m| {
                    let report = m.detect(&y)?;
                    let score = score_detections(&report.intervals, &truth, match_slack)?;
                    let record = ReplicationRecord {
                        replication: r,
                        seed,
                        method: m.label(),
                        detected: report.intervals.len(),
                        true_positives: score.true_positives,
                        false_positives: score.false_positives,
                        fdr: score.fdr,
                    };
                    Ok((record, score.per_true_cp_hits))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut summaries = Vec::with_capacity(methods.len());
    for (k, m) in methods.iter().enumerate() {
        let counts: Vec<usize> = per_rep.iter().map(|v| v[k].0.detected).collect();
        let mean_fdr = per_rep.iter().map(|v| v[k].0.fdr).sum::<f64>() / replications as f64;
        let mut totals: BTreeMap<usize, usize> = truth.iter().map(|&c| (c, 0)).collect();
        for v in &per_rep {
            for (cp, &hit) in &v[k].1 {
                *totals.entry(*cp).or_default() += usize::from(hit);
            }
        }
        summaries.push(MethodSummary {
            method: m.label(),
            counts: summarize_counts(&counts)?,
            true_positive_totals: totals,
            mean_fdr,
        });
    }
    Ok(SimulationSummary {
        scenario: spec.clone(),
        replications,
        seed: base_seed,
        match_slack,
        methods: methods.to_vec(),
        summaries,
        records: per_rep.into_iter().flatten().map(|(r, _)| r).collect(),
    })
}

impl SimulationSummary {
    pub fn summary(&self, label: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == label)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// One row per method: count statistics and mean FDR.
    pub fn counts_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            method: &'a str,
            mean: f64,
            std: f64,
            min: usize,
            q25: usize,
            median: usize,
            q75: usize,
            max: usize,
            mean_fdr: f64,
        }
        let rows: Vec<Row> = self
            .summaries
            .iter()
            .map(|s| Row {
                method: &s.method,
                mean: s.counts.mean,
                std: s.counts.std,
                min: s.counts.min,
                q25: s.counts.q25,
                median: s.counts.median,
                q75: s.counts.q75,
                max: s.counts.max,
                mean_fdr: s.mean_fdr,
            })
            .collect();
        crate::report::to_csv(&rows)
    }

    /// One row per method and true change point: replications that hit it.
    pub fn true_positives_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            method: &'a str,
            change_point: usize,
            true_positives: usize,
            replications: usize,
        }
        let rows: Vec<Row> = self
            .summaries
            .iter()
            .flat_map(|s| {
                s.true_positive_totals.iter().map(|(&cp, &tp)| Row {
                    method: &s.method,
                    change_point: cp,
                    true_positives: tp,
                    replications: self.replications,
                })
            })
            .collect();
        crate::report::to_csv(&rows)
    }

    pub fn records_csv(&self) -> Result<String> {
        crate::report::to_csv(&self.records)
    }
}
