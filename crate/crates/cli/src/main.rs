//! `advbayes`: solve, sweep, certify and regression-check adversarial Bayes
//! classifiers from the command line.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use advbayes::certify::{dual_value, duality_gap, MatchingSummary};
use advbayes::report::to_canonical_json;
use advbayes::solver::{solve, sweep, sweep_grid, SolveOptions, SolveReport, SweepStep};
use advbayes::{examples, Error, Exec, IntervalSet};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{Epsilon, RawRun, RunConfig, Source};

#[derive(Parser)]
#[command(name = "advbayes", version, about = "Adversarial Bayes classifiers in one dimension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate minimizers and equivalence classes at one radius.
    Solve(RunArgs),
    /// Solve over a range of radii and check structural monotonicity.
    Sweep(RunArgs),
    /// Compare the solver against a grid brute force and a transport dual.
    Certify(RunArgs),
    /// Run the pinned regression checks for a built-in example (all if omitted).
    Examples {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in example name
    #[arg(long, conflicts_with = "config")]
    example: Option<String>,
    /// Perturbation radius
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["eps_min", "eps_max", "steps"])]
    eps: Option<f64>,
    /// Smallest sweep radius
    #[arg(long, allow_negative_numbers = true)]
    eps_min: Option<f64>,
    /// Largest sweep radius
    #[arg(long, allow_negative_numbers = true)]
    eps_max: Option<f64>,
    /// Number of sweep radii
    #[arg(long)]
    steps: Option<usize>,
    /// Root-scan grid size [default: 2048]
    #[arg(long)]
    grid_n: Option<usize>,
    /// Brute-force and discretization spacing [default: 0.001]
    #[arg(long, allow_negative_numbers = true)]
    grid_h: Option<f64>,
    /// Brute-force component limit, 1 to 3 [default: 2]
    #[arg(long)]
    max_k: Option<usize>,
    /// Keep endpoints that fail the second-order test
    #[arg(long)]
    keep_all: bool,
    /// Include the full dual matching in the certificate
    #[arg(long)]
    full_matching: bool,
    /// JSON report path (stdout otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV summary path
    #[arg(long)]
    csv: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Outcome {
    Ok,
    Warn,
}

fn exec() -> Exec {
    if cfg!(feature = "parallel") {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ADVBAYES_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("ADVBAYES_THREADS must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(Failure::Usage("ADVBAYES_THREADS must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(())
}

fn load(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match (&args.config, &args.example) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            config::parse_config(&text)?
        }
        (None, Some(name)) => config::finish(Source::Pair(examples::by_name(name)?), RawRun::default())?,
        (None, None) => return Err(Failure::Usage("one of --config or --example is required".into())),
    };
    if let Some(e) = args.eps {
        cfg.epsilon = Some(Epsilon::Single(e));
    }
    match (args.eps_min, args.eps_max) {
        (Some(min), Some(max)) => cfg.epsilon = Some(Epsilon::Sweep { min, max, steps: args.steps.unwrap_or(1) }),
        (None, None) => {
            if let (Some(s), Some(Epsilon::Sweep { min, max, .. })) = (args.steps, cfg.epsilon) {
                cfg.epsilon = Some(Epsilon::Sweep { min, max, steps: s });
            }
        }
        _ => return Err(Failure::Usage("--eps-min and --eps-max go together".into())),
    }
    cfg.grid_n = args.grid_n.unwrap_or(cfg.grid_n);
    cfg.grid_h = args.grid_h.unwrap_or(cfg.grid_h);
    cfg.max_k = args.max_k.unwrap_or(cfg.max_k);
    cfg.keep_all |= args.keep_all;
    cfg.full_matching |= args.full_matching;
    cfg.out = args.out.clone().or(cfg.out);
    cfg.csv = args.csv.clone().or(cfg.csv);
    cfg.validate()?;
    Ok(cfg)
}

fn single_eps(cfg: &RunConfig) -> Result<f64, Failure> {
    match cfg.epsilon {
        Some(Epsilon::Single(e)) => Ok(e),
        Some(Epsilon::Sweep { .. }) => Err(Failure::Usage("this command takes a single --eps".into())),
        None => Err(Failure::Usage("--eps is required".into())),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn opts(cfg: &RunConfig) -> SolveOptions {
    SolveOptions { grid_n: cfg.grid_n, keep_all: cfg.keep_all, exec: exec() }
}

const CSV_HEADER: [&str; 8] =
    ["epsilon", "min_risk", "n_classes", "unique", "comp_a", "comp_ac", "monotone", "representatives"];

fn csv_row(r: &SolveReport, monotone: &str) -> Vec<String> {
    let first = r.classes.first().map(|c| c.representative.clone()).unwrap_or_default();
    let reps: Vec<String> = r.classes.iter().map(|c| c.representative.to_string()).collect();
    vec![
        format!("{:.16e}", r.epsilon),
        format!("{:.16e}", r.min_risk),
        r.classes.len().to_string(),
        r.unique_up_to_degeneracy.to_string(),
        first.components().to_string(),
        first.complement().components().to_string(),
        monotone.to_string(),
        reps.join(" | "),
    ]
}

fn write_csv(path: Option<&Path>, rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    emit(path, &String::from_utf8_lossy(&bytes))
}

fn cmd_solve(args: &RunArgs) -> Result<Outcome, Failure> {
    let cfg = load(args)?;
    let eps = single_eps(&cfg)?;
    let report = solve(cfg.pair()?, eps, &opts(&cfg))?;
    emit(cfg.out.as_deref(), &to_canonical_json(&report)?)?;
    if let Some(p) = &cfg.csv {
        write_csv(Some(p), &[csv_row(&report, "")])?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if report.warnings.is_empty() { Outcome::Ok } else { Outcome::Warn })
}

fn verdict(step: &SweepStep) -> &'static str {
    match &step.check {
        Some(c) if c.holds => "holds",
        Some(_) => "violated",
        None => "n/a",
    }
}

fn cmd_sweep(args: &RunArgs) -> Result<Outcome, Failure> {
    let cfg = load(args)?;
    let grid = match cfg.epsilon {
        Some(Epsilon::Sweep { min, max, steps }) => sweep_grid(min, max, steps),
        Some(Epsilon::Single(e)) => vec![e],
        None => return Err(Failure::Usage("--eps-min, --eps-max and --steps are required".into())),
    };
    let result = sweep(cfg.pair()?, &grid, &opts(&cfg))?;
    let rows: Vec<Vec<String>> = result
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| csv_row(r, if i == 0 { "" } else { verdict(&result.steps[i - 1]) }))
        .collect();
    write_csv(cfg.csv.as_deref(), &rows)?;
    if let Some(p) = &cfg.out {
        emit(Some(p), &to_canonical_json(&result)?)?;
    }
    let mut warned = false;
    for r in &result.reports {
        for w in &r.warnings {
            eprintln!("warning (eps={}): {w}", r.epsilon);
            warned = true;
        }
    }
    for s in &result.steps {
        if let Some(c) = &s.check {
            for v in &c.violations {
                eprintln!("monotonicity ({} -> {}): {v}", s.eps1, s.eps2);
                warned = true;
            }
        }
    }
    Ok(if warned { Outcome::Warn } else { Outcome::Ok })
}

#[derive(Serialize)]
struct CertifyOutput {
    epsilon: f64,
    grid_h: f64,
    max_k: Option<usize>,
    dual_value: f64,
    primal: Option<f64>,
    gap: Option<f64>,
    solver_min_risk: Option<f64>,
    argmin: Option<IntervalSet>,
    atoms0: usize,
    atoms1: usize,
    matching_summary: MatchingSummary,
    matching: Option<Vec<(usize, usize, f64)>>,
    tolerance: f64,
    within_tolerance: bool,
}

fn cmd_certify(args: &RunArgs) -> Result<Outcome, Failure> {
    let cfg = load(args)?;
    let eps = single_eps(&cfg)?;
    let out = match &cfg.source {
        Source::Atoms { class0, class1 } => {
            let cert = dual_value(class0, class1, eps, 0.0)?;
            CertifyOutput {
                epsilon: eps,
                grid_h: 0.0,
                max_k: None,
                dual_value: cert.dual_value,
                primal: None,
                gap: None,
                solver_min_risk: None,
                argmin: None,
                atoms0: class0.len(),
                atoms1: class1.len(),
                matching_summary: cert.summary(class0, class1),
                matching: cfg.full_matching.then(|| cert.matching.clone()),
                tolerance: cfg.tolerance,
                within_tolerance: true,
            }
        }
        Source::Pair(pair) => {
            let report = solve(pair, eps, &opts(&cfg))?;
            let g = duality_gap(pair, eps, cfg.grid_h, cfg.max_k, exec())?;
            let ok = (report.min_risk - g.primal).abs() <= cfg.tolerance && g.gap.abs() <= cfg.tolerance;
            CertifyOutput {
                epsilon: eps,
                grid_h: cfg.grid_h,
                max_k: Some(cfg.max_k),
                dual_value: g.dual,
                primal: Some(g.primal),
                gap: Some(g.gap),
                solver_min_risk: Some(report.min_risk),
                argmin: Some(g.argmin.clone()),
                atoms0: g.atoms0,
                atoms1: g.atoms1,
                matching_summary: g.summary.clone(),
                matching: cfg.full_matching.then(|| g.certificate.matching.clone()),
                tolerance: cfg.tolerance,
                within_tolerance: ok,
            }
        }
    };
    emit(cfg.out.as_deref(), &to_canonical_json(&out)?)?;
    if !out.within_tolerance {
        eprintln!("certificate outside tolerance {}", cfg.tolerance);
        return Ok(Outcome::Warn);
    }
    Ok(Outcome::Ok)
}

fn cmd_examples(name: Option<&str>, out: Option<&Path>) -> Result<Outcome, Failure> {
    let names: Vec<&str> = match name {
        Some(n) => {
            examples::by_name(n)?;
            vec![n]
        }
        None => examples::NAMES.to_vec(),
    };
    let mut reports = Vec::new();
    let mut all = true;
    for n in names {
        let r = examples::run_example(n, exec())?;
        for c in &r.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let stated = c.stated.as_deref().map(|s| format!(" (stated: {s})")).unwrap_or_default();
            println!("{status} {n}: {} computed={:.12} expected={:.12}{stated}", c.name, c.computed, c.expected);
        }
        all &= r.passed();
        reports.push(r);
    }
    if let Some(p) = out {
        emit(Some(p), &to_canonical_json(&reports)?)?;
    }
    Ok(if all { Outcome::Ok } else { Outcome::Warn })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Examples { name, out } => cmd_examples(name.as_deref(), out.as_deref()),
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Warn) => ExitCode::from(2),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
