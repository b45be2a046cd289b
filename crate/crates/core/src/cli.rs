//! The `fairdyn` command line: `simulate`, `equilibria`, `sweep`, `compare`.
//!
//! Exit codes: 0 success, 1 output failure, 2 configuration or usage error,
//! 3 numeric failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{equilibrium_report, SearchOptions};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::harness::{detect_convergence, run_trajectory, settling_step, sweep_grid, Scenario, SweepResult, TrajectoryRecord};
use crate::interventions::InterventionSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Tolerance for the equalized-odds and demographic-parity flags in `compare`.
pub const FAIRNESS_TOL: f64 = 1e-9;

pub const THREADS_ENV: &str = "FAIRDYN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fairdyn", version, about = "Classifier/population feedback dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one trajectory from `s0` and write every recorded step.
    Simulate(RunArgs),
    /// Report the equilibrium hyperplanes and their stability.
    Equilibria(RunArgs),
    /// One-step displacement field over a grid of two-group states.
    Sweep(RunArgs),
    /// Run every listed intervention from the same `s0` and tabulate the outcome.
    Compare(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output file (directory for multi-intervention sweeps); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Model(Error::Io(_)) | CliError::Output(_) => EXIT_IO,
            CliError::Model(_) | CliError::Usage(_) => EXIT_CONFIG,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> i32 {
    let result = match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Equilibria(a) => cmd_equilibria(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(args: &RunArgs) -> CliResult<ScenarioConfig> {
    let mut cfg = ScenarioConfig::from_path(&args.config)?;
    for (flag, value, slot) in [
        ("--steps", args.steps, &mut cfg.run.steps),
        ("--stride", args.stride, &mut cfg.run.stride),
        ("--resolution", args.resolution, &mut cfg.run.resolution),
    ] {
        if let Some(v) = value {
            if v == 0 {
                return Err(CliError::Usage(format!("{flag} must be at least 1")));
            }
            *slot = v;
        }
    }
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes floats with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

/// Serializes `value` as JSON with 17-significant-digit floats. Non-finite
/// floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    writeln!(out, "{}", to_json(value)?)?;
    out.flush()?;
    Ok(())
}

/// Shortest round-trip representation, switching to exponent form for very
/// small or large magnitudes.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// CSV header for trajectory output over `n` groups.
pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|g| format!("s_{g}")));
    h.push("s_bar".into());
    h.push("disparity_l1".into());
    for prefix in ["phi", "acc", "fpr", "fnr"] {
        h.extend((1..=n).map(|g| format!("{prefix}_{g}")));
    }
    h
}

pub fn write_trajectory_csv(out: &mut dyn Write, records: &[TrajectoryRecord]) -> csv::Result<()> {
    let n = records.first().map_or(0, |r| r.s.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(n))?;
    for r in records {
        let mut row = vec![r.t.to_string()];
        row.extend(r.s.iter().copied().map(fmt));
        row.push(fmt(r.s_bar));
        row.push(fmt(r.disparity_l1));
        for series in [&r.phi, &r.acceptance, &r.fpr, &r.fnr] {
            row.extend(series.iter().copied().map(fmt));
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const SWEEP_HEADER: [&str; 7] = ["s1", "s2", "ds1", "ds2", "acc1", "fpr1", "fnr1"];

pub fn write_sweep_csv(out: &mut dyn Write, sweep: &SweepResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for c in &sweep.cells {
        w.write_record([c.s1, c.s2, c.ds1, c.ds2, c.acc1, c.fpr1, c.fnr1].map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

/// Warnings for feedback-control gains whose sign does not match the slope
/// of the fitness gap at an equilibrium hyperplane.
pub fn feedback_warnings(scenario: &Scenario, spec: &InterventionSpec) -> Vec<String> {
    let epsilon = match spec {
        InterventionSpec::FeedbackControl { epsilon } => *epsilon,
        InterventionSpec::UniversalSubsidy { inner: Some(inner), .. }
        | InterventionSpec::CapacityCapped { inner, .. } => {
            return feedback_warnings(scenario, inner)
        }
        _ => return Vec::new(),
    };
    let Ok(report) = equilibrium_report(
        &scenario.features,
        &scenario.success,
        &scenario.payoffs,
        &scenario.mu,
        &SearchOptions::default(),
    ) else {
        return Vec::new();
    };
    report
        .hyperplanes
        .iter()
        .filter(|h| epsilon.signum() * h.gap_slope.signum() <= 0.0)
        .map(|h| {
            format!(
                "epsilon = {epsilon} does not contract disparity near the {:?} hyperplane \
                 (fitness-gap slope {:.6})",
                h.flank, h.gap_slope
            )
        })
        .collect()
}

fn warn_feedback(scenario: &Scenario, spec: &InterventionSpec) {
    for w in feedback_warnings(scenario, spec) {
        eprintln!("warning: {w}");
    }
}

fn cmd_simulate(args: &RunArgs) -> CliResult {
    let cfg = load(args)?;
    let s0 = cfg.require_s0()?;
    warn_feedback(&cfg.scenario, &cfg.scenario.intervention);
    let records = run_trajectory(&cfg.scenario, s0, cfg.run.steps, cfg.run.stride)?;
    let mut out = open_out(args.out.as_deref())?;
    match args.format.unwrap_or(Format::Csv) {
        Format::Csv => write_trajectory_csv(&mut out, &records)?,
        Format::Json => write_json(&mut out, &records)?,
    }
    Ok(())
}

fn cmd_equilibria(args: &RunArgs) -> CliResult {
    let cfg = load(args)?;
    let sc = &cfg.scenario;
    let report = equilibrium_report(&sc.features, &sc.success, &sc.payoffs, &sc.mu, &SearchOptions::default())?;
    let mut out = open_out(args.out.as_deref())?;
    match args.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&mut out, &report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["flank", "phi_star", "phi", "s_bar", "gap_slope", "w_eq", "lambda", "stability"])?;
            for h in &report.hyperplanes {
                w.write_record([
                    format!("{:?}", h.flank).to_lowercase(),
                    fmt(report.phi_star),
                    fmt(h.phi),
                    fmt(h.s_bar),
                    fmt(h.gap_slope),
                    fmt(h.w_eq),
                    fmt(h.lambda),
                    format!("{:?}", h.stability).to_lowercase(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Thread pool honouring `FAIRDYN_THREADS` (unset or 0: one thread per core).
fn sweep_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Err(_) => 0,
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}"))
        })?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// File name for the `index`-th sweep of a multi-intervention run.
pub fn sweep_file_name(index: usize, spec: &InterventionSpec) -> String {
    format!("sweep_{index:02}_{}.csv", spec.tag())
}

fn cmd_sweep(args: &RunArgs) -> CliResult {
    let cfg = load(args)?;
    if cfg.scenario.groups() != 2 {
        return Err(CliError::Usage(format!(
            "sweep needs exactly two groups, config has {}",
            cfg.scenario.groups()
        )));
    }
    if cfg.run.resolution < 2 {
        return Err(CliError::Usage("resolution must be at least 2".into()));
    }
    if args.format == Some(Format::Json) {
        return Err(CliError::Usage("sweep output is CSV only".into()));
    }
    let pool = sweep_pool()?;
    let run = |spec: &InterventionSpec| -> CliResult<SweepResult> {
        let sc = cfg.scenario.with_intervention(spec.clone())?;
        Ok(pool.install(|| sweep_grid(&sc, cfg.run.resolution))?)
    };
    if cfg.interventions.is_empty() {
        let sweep = run(&cfg.scenario.intervention)?;
        let mut out = open_out(args.out.as_deref())?;
        write_sweep_csv(&mut out, &sweep)?;
        return Ok(());
    }
    let dir = args.out.as_deref().ok_or_else(|| {
        CliError::Usage("--out <directory> is required when the config lists interventions".into())
    })?;
    std::fs::create_dir_all(dir)?;
    for (i, spec) in cfg.interventions.iter().enumerate() {
        let sweep = run(spec)?;
        let mut out = open_out(Some(&dir.join(sweep_file_name(i, spec))))?;
        write_sweep_csv(&mut out, &sweep)?;
    }
    Ok(())
}

/// One row of the `compare` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub intervention: String,
    pub terminal_s_bar: f64,
    pub terminal_disparity_l1: f64,
    /// First step after which the state never moves by more than the tolerance.
    pub steps_to_convergence: Option<usize>,
    pub eo_satisfied: bool,
    pub dp_satisfied: bool,
}

/// Runs each intervention from `s0` for `steps` steps.
pub fn compare(
    scenario: &Scenario,
    s0: &crate::state::PopulationState,
    interventions: &[InterventionSpec],
    steps: usize,
    window: usize,
    tol: f64,
) -> Result<Vec<ComparisonRow>> {
    interventions
        .iter()
        .map(|spec| {
            let sc = scenario.with_intervention(spec.clone())?;
            let records = run_trajectory(&sc, s0, steps, 1)?;
            let report = detect_convergence(&records, window.min(records.len()), tol)?;
            let last = records.last().expect("at least two records");
            Ok(ComparisonRow {
                intervention: spec.label(),
                terminal_s_bar: last.s_bar,
                terminal_disparity_l1: last.disparity_l1,
                steps_to_convergence: if report.converged { settling_step(&records, tol) } else { None },
                eo_satisfied: last.equalized_odds(FAIRNESS_TOL),
                dp_satisfied: last.demographic_parity(FAIRNESS_TOL),
            })
        })
        .collect()
}

fn cmd_compare(args: &RunArgs) -> CliResult {
    let cfg = load(args)?;
    if cfg.interventions.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least two entries in `interventions`, config lists {}",
            cfg.interventions.len()
        )));
    }
    let s0 = cfg.require_s0()?;
    for spec in &cfg.interventions {
        warn_feedback(&cfg.scenario, spec);
    }
    let rows = compare(&cfg.scenario, s0, &cfg.interventions, cfg.run.steps, cfg.run.window, cfg.run.tol)?;
    let mut out = open_out(args.out.as_deref())?;
    match args.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(&mut out, &rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record([
                "intervention",
                "terminal_s_bar",
                "terminal_disparity_l1",
                "steps_to_convergence",
                "eo_satisfied",
                "dp_satisfied",
            ])?;
            for r in &rows {
                w.write_record([
                    r.intervention.clone(),
                    fmt(r.terminal_s_bar),
                    fmt(r.terminal_disparity_l1),
                    r.steps_to_convergence.map_or_else(String::new, |s| s.to_string()),
                    r.eo_satisfied.to_string(),
                    r.dp_satisfied.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
