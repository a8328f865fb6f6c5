use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use trendbreak::evaluation::{
    run_study, simulate_random_walk, ScenarioSpec, SimulationSummary, StudyMethod,
};
use trendbreak::hp::{hp_detect, hp_fit, hp_lambda_scan, HpScanOptions};
use trendbreak::io::{ingest_csv, write_atomic, ColumnSpec};
use trendbreak::l1::{
    l1_detect, l1_fit, l1_lambda_scan, L1Config, L1ScanOptions, Optimizer, ThresholdRule,
};
use trendbreak::pelt::{pelt_detect, PeltConfig};
use trendbreak::report::lambda_grid;
use trendbreak::{ChangePointReport, Method, TimeSeries};

const DEFAULT_SEED: u64 = 20_240_101;

#[derive(Parser)]
#[command(
    name = "trendbreak",
    version,
    about = "Change-point detection for random-walk series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect change points in one series.
    Detect(DetectArgs),
    /// Evaluate a grid of λ values and report the selected one.
    Scan(ScanArgs),
    /// Monte-Carlo study on simulated random walks.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    NoCp,
    TwoCp,
    File,
}

/// Where the series comes from.
#[derive(Args)]
struct SourceArgs {
    /// CSV file to read (with `--scenario file`, the default).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Value column, by header name or 0-based index. Defaults to the last column.
    #[arg(long)]
    column: Option<String>,
    /// Simulate a built-in scenario instead of reading a file.
    #[arg(long, value_enum, default_value = "file")]
    scenario: Scenario,
    #[arg(long, env = "TRENDBREAK_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Parameters shared by the detectors.
#[derive(Args)]
struct DetectorArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Significance level of the HP residual band.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// ℓ₁ threshold rule: max-df, percentile:<a> or top-k:<k>.
    #[arg(long, default_value = "max-df", value_parser = parse_rule)]
    threshold: ThresholdRule,
    /// PELT penalty per change point.
    #[arg(long, default_value_t = 1.0)]
    penalty: f64,
    /// RPROP iterations (ℓ₁ only).
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value = "rprop", value_parser = parse_optimizer)]
    optimizer: Optimizer,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Penalty λ (HP and ℓ₁).
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    /// λ grid as lo:hi:step.
    #[arg(long, default_value = "1:100:1")]
    grid: String,
    /// Write the scan table (CSV) here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, env = "TRENDBREAK_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run one method only. Without it, PELT, HP and the ℓ₁ rules are compared.
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// λ for the single method chosen with `--method`.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value = "max-df", value_parser = parse_rule)]
    threshold: ThresholdRule,
    #[arg(long, default_value_t = 1.0)]
    penalty: f64,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value = "rprop", value_parser = parse_optimizer)]
    optimizer: Optimizer,
    /// Directory for summary.json, counts.csv, true_positives.csv and records.csv.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: trendbreak::Error| e.to_string())
}

fn parse_rule(s: &str) -> Result<ThresholdRule, String> {
    s.parse().map_err(|e: trendbreak::Error| e.to_string())
}

fn parse_optimizer(s: &str) -> Result<Optimizer, String> {
    s.parse().map_err(|e: trendbreak::Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        bail!(trendbreak::Error::Parameter(format!(
            "grid `{s}` is not lo:hi:step"
        )));
    };
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| trendbreak::Error::Parameter(format!("grid value `{v}` is not a number")))
    };
    Ok(lambda_grid(num(lo)?, num(hi)?, num(step)?)?)
}

fn load_series(src: &SourceArgs) -> Result<TimeSeries> {
    let spec = match src.scenario {
        Scenario::File => {
            let Some(path) = &src.input else {
                bail!(trendbreak::Error::Input(
                    "--input is required with --scenario file".into()
                ));
            };
            let column = src
                .column
                .as_deref()
                .map(str::parse::<ColumnSpec>)
                .transpose()?;
            return Ok(ingest_csv(path, column.as_ref())?);
        }
        Scenario::NoCp => ScenarioSpec::no_change(),
        Scenario::TwoCp => ScenarioSpec::two_changes(),
    };
    if src.input.is_some() {
        bail!(trendbreak::Error::Input(
            "--input only applies to --scenario file".into()
        ));
    }
    Ok(simulate_random_walk(&spec, src.seed)?)
}

fn l1_config(iterations: usize, optimizer: Optimizer) -> L1Config {
    let mut cfg = L1Config::default().with_optimizer(optimizer);
    cfg.max_iterations = iterations;
    cfg.proximal.max_iterations = cfg.proximal.max_iterations.max(iterations);
    cfg
}

fn require_lambda(lambda: Option<f64>, method: Method) -> Result<f64> {
    lambda.ok_or_else(|| {
        trendbreak::Error::Parameter(format!("--lambda is required for {method}")).into()
    })
}

fn detect(args: &DetectArgs) -> Result<()> {
    let y = load_series(&args.source)?;
    let d = &args.detector;
    let report = match d.method {
        Method::Hp => hp_detect(
            &y,
            &hp_fit(&y, require_lambda(args.lambda, d.method)?)?,
            d.alpha,
        )?,
        Method::L1 => {
            let cfg = l1_config(d.iterations, d.optimizer);
            l1_detect(
                &y,
                &l1_fit(&y, require_lambda(args.lambda, d.method)?, &cfg)?,
                d.threshold,
            )?
        }
        Method::Pelt => pelt_detect(
            &y,
            &PeltConfig {
                penalty: d.penalty,
                ..PeltConfig::default()
            },
        )?,
    };
    print!("{}", report_table(&report, &y));
    if let Some(out) = &args.output {
        write_atomic(out, report.to_json()?.as_bytes())?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn report_table(r: &ChangePointReport, y: &TimeSeries) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "method       {}", r.method);
    let _ = writeln!(s, "length       {}", r.series_length);
    let _ = writeln!(s, "lambda       {}", opt(r.lambda));
    if let Some(rule) = r.threshold_rule {
        let _ = writeln!(s, "threshold    {rule}");
    }
    if let Some(p) = r.penalty {
        let _ = writeln!(s, "penalty      {p}");
    }
    let dg = &r.diagnostics;
    let _ = writeln!(s, "rmse         {}", opt(dg.rmse));
    let _ = writeln!(s, "shapiro_p    {}", opt(dg.shapiro_p));
    let _ = writeln!(s, "df_hat       {}", opt(dg.df_hat));
    let _ = writeln!(s, "prob         {}", opt(dg.prob));
    let _ = writeln!(s, "sigma2_hat   {}", opt(dg.sigma2_hat));
    let _ = writeln!(s, "intervals    {}", r.intervals.len());
    for iv in &r.intervals {
        if y.labels().is_some() {
            let _ = writeln!(s, "  {iv}  ({} .. {})", y.label(iv.lo), y.label(iv.hi));
        } else {
            let _ = writeln!(s, "  {iv}");
        }
    }
    s
}

fn emit(table: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => Ok(write_atomic(path, table.as_bytes())?),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn scan(args: &ScanArgs) -> Result<()> {
    let y = load_series(&args.source)?;
    let grid = parse_grid(&args.grid)?;
    let d = &args.detector;
    let (table, selected) = match d.method {
        Method::Hp => {
            let opts = HpScanOptions {
                alpha: d.alpha,
                ..HpScanOptions::default()
            };
            let t = hp_lambda_scan(&y, &grid, opts)?;
            (t.to_csv()?, t.selected_lambda)
        }
        Method::L1 => {
            let opts = L1ScanOptions {
                alpha: d.alpha,
                config: l1_config(d.iterations, d.optimizer),
            };
            let t = l1_lambda_scan(&y, &grid, &opts)?;
            (t.to_csv()?, t.selected_lambda)
        }
        Method::Pelt => bail!(trendbreak::Error::Parameter("pelt has no λ to scan".into())),
    };
    emit(&table, args.output.as_deref())?;
    let line = format!("selected lambda: {}", opt(selected));
    if args.output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

/// The method set compared in the published tables for each scenario.
fn default_methods(scenario: Scenario) -> Vec<StudyMethod> {
    match scenario {
        Scenario::TwoCp => vec![
            StudyMethod::pelt(),
            StudyMethod::hp(13.0),
            StudyMethod::l1(2.0, ThresholdRule::MaxDf),
            StudyMethod::l1(2.0, ThresholdRule::Percentile(0.05)),
            StudyMethod::l1(2.0, ThresholdRule::TopK(2)),
        ],
        _ => vec![
            StudyMethod::pelt(),
            StudyMethod::hp(13.0),
            StudyMethod::l1(1.0, ThresholdRule::MaxDf),
        ],
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let spec = match args.scenario {
        Scenario::NoCp => ScenarioSpec::no_change(),
        Scenario::TwoCp => ScenarioSpec::two_changes(),
        Scenario::File => bail!(trendbreak::Error::Parameter(
            "simulate needs a built-in scenario (no-cp or two-cp)".into()
        )),
    };
    let methods = match args.method {
        None => default_methods(args.scenario),
        Some(Method::Pelt) => vec![StudyMethod::Pelt(PeltConfig {
            penalty: args.penalty,
            ..PeltConfig::default()
        })],
        Some(Method::Hp) => vec![StudyMethod::Hp {
            lambda: require_lambda(args.lambda, Method::Hp)?,
            alpha: args.alpha,
            variance_model: Default::default(),
        }],
        Some(Method::L1) => vec![StudyMethod::L1 {
            lambda: trendbreak::evaluation::L1Lambda::Fixed(require_lambda(
                args.lambda,
                Method::L1,
            )?),
            rule: args.threshold,
            config: l1_config(args.iterations, args.optimizer),
        }],
    };
    let study = run_study(&spec, &methods, args.reps, args.seed, 0)?;
    print!("{}", summary_table(&study));
    if let Some(dir) = &args.output {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_atomic(&dir.join("summary.json"), study.to_json()?.as_bytes())?;
        write_atomic(&dir.join("counts.csv"), study.counts_csv()?.as_bytes())?;
        write_atomic(
            &dir.join("true_positives.csv"),
            study.true_positives_csv()?.as_bytes(),
        )?;
        write_atomic(&dir.join("records.csv"), study.records_csv()?.as_bytes())?;
    }
    Ok(())
}

fn summary_table(study: &SimulationSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "scenario {}  replications {}  seed {}",
        study.scenario.name, study.replications, study.seed
    );
    let truth = study.scenario.true_change_points();
    let mut header = format!(
        "{:<22}{:>10}{:>10}{:>6}{:>6}{:>8}{:>6}{:>6}",
        "method", "mean", "std", "min", "q25", "median", "q75", "max"
    );
    for cp in &truth {
        let _ = write!(header, "{:>8}", format!("tp@{cp}"));
    }
    if !truth.is_empty() {
        header.push_str("       fdr");
    }
    let _ = writeln!(s, "{header}");
    for m in &study.summaries {
        let c = m.counts;
        let mut row = format!(
            "{:<22}{:>10.3}{:>10.3}{:>6}{:>6}{:>8}{:>6}{:>6}",
            m.method, c.mean, c.std, c.min, c.q25, c.median, c.q75, c.max
        );
        for cp in &truth {
            let _ = write!(
                row,
                "{:>8}",
                m.true_positive_totals.get(cp).copied().unwrap_or(0)
            );
        }
        if !truth.is_empty() {
            let _ = write!(row, "{:>10.4}", m.mean_fdr);
        }
        let _ = writeln!(s, "{row}");
    }
    s
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<trendbreak::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Scan(a) => scan(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_exit_with_three() {
        let singular = anyhow::Error::from(trendbreak::Error::Singular {
            row: 2,
            pivot: -1.0,
        });
        assert_eq!(exit_code(&singular), 3);
        let bad = anyhow::Error::from(trendbreak::Error::Parameter("x".into()));
        assert_eq!(exit_code(&bad), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 2);
    }

    #[test]
    fn grid_flag() {
        assert_eq!(parse_grid("1:3:1").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("5:5:1").unwrap(), vec![5.0]);
        for bad in ["1:3", "a:3:1", "3:1:1", "1:3:0"] {
            assert_eq!(exit_code(&parse_grid(bad).unwrap_err()), 2, "{bad}");
        }
    }
}
