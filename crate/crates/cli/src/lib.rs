//! The `xbarsim` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use xbar_arch::ArchConfig;
use xbar_eval::{
    attribute, attribution_csv, compare, comparison_csv, evaluate_suite, reports_csv,
    run_verification, sweep, sweep_csv, to_json, verify_csv, DesignPoint, EvalError, SweepGrid,
    VerifyOptions, DEFAULT_STEPS, SCHEMA_VERSION,
};
use xbar_mapper::{plan_network, MappingPlan, NetworkDesc};
use xbar_workloads::{load_arch, load_network, suite, WorkloadError};

#[derive(Debug, Parser)]
#[command(
    name = "xbarsim",
    version,
    about = "Analytic simulator for bit-sliced crossbar CNN accelerators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Workload {
    /// Network description file or shipped benchmark name; repeatable.
    #[arg(long = "network")]
    pub networks: Vec<PathBuf>,
    /// Use the nine shipped benchmark networks.
    #[arg(long)]
    pub suite: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Target {
    /// Architecture file, or `isaac` / `newton`.
    #[arg(long, default_value = "newton")]
    pub arch: PathBuf,
    /// Override a setting: `key=value` (sweep accepts `key=v1,v2,...`).
    #[arg(long = "set", value_name = "KEY=VALUES")]
    pub sets: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every oracle-equivalence suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random cases for the pipeline and adaptive-ADC suites.
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
    },
    /// Map networks onto tiles and emit the plan.
    Map {
        #[command(flatten)]
        workload: Workload,
        #[command(flatten)]
        target: Target,
    },
    /// Evaluate networks on one design point.
    Simulate {
        #[command(flatten)]
        workload: Workload,
        #[command(flatten)]
        target: Target,
    },
    /// Evaluate the cartesian product of `--set` value lists.
    Sweep {
        #[command(flatten)]
        workload: Workload,
        #[command(flatten)]
        target: Target,
    },
    /// Compare a candidate (`--arch`) with a baseline.
    Compare {
        #[command(flatten)]
        workload: Workload,
        #[command(flatten)]
        target: Target,
        /// Baseline architecture file, or `isaac` / `newton`.
        #[arg(long, default_value = "isaac")]
        baseline: PathBuf,
        /// Emit the per-optimization attribution table instead of deltas
        /// (CSV only; JSON always carries both).
        #[arg(long)]
        attribution: bool,
    },
}

/// Machine-readable failure record written to standard error.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub schema_version: u32,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl ErrorRecord {
    fn new(kind: &'static str, message: String) -> Self {
        ErrorRecord {
            schema_version: SCHEMA_VERSION,
            kind,
            message,
            file: None,
            line: None,
            column: None,
        }
    }

    pub fn from_error(err: &anyhow::Error) -> Self {
        let message = format!("{err:#}");
        for cause in err.chain() {
            if let Some(w) = cause.downcast_ref::<WorkloadError>() {
                return match w {
                    WorkloadError::Parse {
                        file, line, column, ..
                    } => ErrorRecord {
                        file: file.clone(),
                        line: Some(*line),
                        column: Some(*column),
                        ..ErrorRecord::new("parse", message)
                    },
                    WorkloadError::Io { .. } => ErrorRecord::new("io", message),
                    WorkloadError::UnknownBenchmark(_) => ErrorRecord::new("usage", message),
                    WorkloadError::Network(_) => ErrorRecord::new("network", message),
                    WorkloadError::Arch(_) => ErrorRecord::new("config", message),
                };
            }
            if cause.downcast_ref::<xbar_arch::ArchError>().is_some() {
                return ErrorRecord::new("config", message);
            }
            if cause.downcast_ref::<Failed>().is_some() {
                return ErrorRecord::new("verification_failed", message);
            }
            if let Some(e) = cause.downcast_ref::<EvalError>() {
                let kind = match e {
                    EvalError::NumericsGate(_) => "verification_failed",
                    EvalError::Grid(_) | EvalError::EmptySuite => "usage",
                    EvalError::Arch(_) => "config",
                    EvalError::Mapper(_) => "network",
                    _ => "evaluation",
                };
                return ErrorRecord::new(kind, message);
            }
            if cause.downcast_ref::<xbar_mapper::MapperError>().is_some() {
                return ErrorRecord::new("network", message);
            }
            if cause.downcast_ref::<Usage>().is_some() {
                return ErrorRecord::new("usage", message);
            }
            if cause.downcast_ref::<std::io::Error>().is_some() {
                return ErrorRecord::new("io", message);
            }
        }
        ErrorRecord::new("error", message)
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn networks(w: &Workload) -> Result<Vec<NetworkDesc>> {
    let mut nets = if w.suite { suite()? } else { Vec::new() };
    for p in &w.networks {
        nets.push(load_network(p).with_context(|| format!("loading network {}", p.display()))?);
    }
    if nets.is_empty() {
        return Err(usage("no workload: pass --network <file> or --suite"));
    }
    Ok(nets)
}

fn arch(path: &Path) -> Result<ArchConfig> {
    load_arch(path).with_context(|| format!("loading architecture {}", path.display()))
}

fn split_set(s: &str) -> Result<(String, Vec<String>)> {
    let axis = SweepGrid::parse_axis(s).map_err(|e| usage(e.to_string()))?;
    Ok((axis.key, axis.values))
}

/// Design point with single-valued `--set` overrides applied.
fn point(t: &Target) -> Result<DesignPoint> {
    let mut p = DesignPoint::new(arch(&t.arch)?);
    for s in &t.sets {
        let (key, values) = split_set(s)?;
        if values.len() != 1 {
            return Err(usage(format!(
                "`--set {s}` lists several values; only sweep accepts that"
            )));
        }
        p = p.with(&key, &values[0])?;
    }
    Ok(p)
}

#[derive(Serialize)]
struct MapReport<'a> {
    schema_version: u32,
    design: &'a str,
    plans: &'a [MappingPlan],
}

fn map_csv(plans: &[MappingPlan]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "schema_version",
        "network",
        "layer",
        "kind",
        "tile_kind",
        "weight_rows",
        "weight_cols",
        "replication",
        "imas",
        "crossbars",
        "cell_utilization",
        "strassen_freed_imas",
        "steps_per_replica",
        "tiles",
        "buffer_bytes",
        "buffer_bytes_per_tile",
    ])?;
    for p in plans {
        for l in &p.layers {
            w.write_record([
                SCHEMA_VERSION.to_string(),
                p.network.clone(),
                l.name.clone(),
                l.kind.keyword().to_string(),
                format!("{:?}", l.tile_kind).to_lowercase(),
                l.fold.rows.to_string(),
                l.fold.cols.to_string(),
                l.replication.to_string(),
                l.ima_count.to_string(),
                l.crossbar_count.to_string(),
                l.utilization.to_string(),
                l.strassen_freed.to_string(),
                l.steps_per_replica.to_string(),
                l.tile_ids.len().to_string(),
                l.buffer_bytes.to_string(),
                l.buffer_bytes_per_tile.to_string(),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct CompareReport {
    schema_version: u32,
    comparison: xbar_eval::Comparison,
    attribution: xbar_eval::Attribution,
}

/// Runs one command and returns the rendered report. A report that was
/// produced but records a failure is returned as `Ok((text, false))`.
pub fn execute(cli: &Cli) -> Result<(String, bool)> {
    let fmt = cli.output.format;
    Ok(match &cli.command {
        Command::Verify { seed, cases } => {
            let opts = VerifyOptions {
                seed: *seed,
                random_cases: *cases,
                ..VerifyOptions::default()
            };
            let r = run_verification(&opts)?;
            let text = match fmt {
                Format::Json => to_json(&r)?,
                Format::Csv => verify_csv(&r)?,
            };
            (text, r.passed())
        }
        Command::Map { workload, target } => {
            let p = point(target)?;
            let plans = networks(workload)?
                .iter()
                .map(|n| plan_network(n, &p.arch))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let text = match fmt {
                Format::Json => to_json(&MapReport {
                    schema_version: SCHEMA_VERSION,
                    design: &p.label,
                    plans: &plans,
                })?,
                Format::Csv => map_csv(&plans)?,
            };
            (text, true)
        }
        Command::Simulate { workload, target } => {
            let reports = evaluate_suite(&point(target)?, &networks(workload)?)?;
            let text = match fmt {
                Format::Json => to_json(&reports)?,
                Format::Csv => reports_csv(&reports)?,
            };
            (text, true)
        }
        Command::Sweep { workload, target } => {
            let base = DesignPoint::new(arch(&target.arch)?);
            let mut grid = SweepGrid::new();
            for s in &target.sets {
                grid.axes
                    .push(SweepGrid::parse_axis(s).map_err(|e| usage(e.to_string()))?);
            }
            if grid.axes.is_empty() {
                return Err(usage("sweep needs at least one --set key=v1,v2,..."));
            }
            let r = sweep(&base, &grid, &networks(workload)?)?;
            let text = match fmt {
                Format::Json => to_json(&r)?,
                Format::Csv => sweep_csv(&r)?,
            };
            (text, true)
        }
        Command::Compare {
            workload,
            target,
            baseline,
            attribution,
        } => {
            let nets = networks(workload)?;
            let base = DesignPoint::new(arch(baseline)?);
            let cand = point(target)?;
            let c = compare(&base, &cand, &nets)?;
            let (bt, ct) = (
                toml_value(&base.arch.toggles)?,
                toml_value(&cand.arch.toggles)?,
            );
            let steps: Vec<(&str, String)> = DEFAULT_STEPS
                .iter()
                .filter(|(k, _)| bt.get(k) != ct.get(k))
                .map(|(k, _)| (*k, ct.get(k).map(render).unwrap_or_default()))
                .collect();
            let steps: Vec<(&str, &str)> = steps.iter().map(|(k, v)| (*k, v.as_str())).collect();
            let a = attribute(&base, &steps, &nets)?;
            let text = match (fmt, attribution) {
                (Format::Json, _) => to_json(&CompareReport {
                    schema_version: SCHEMA_VERSION,
                    comparison: c,
                    attribution: a,
                })?,
                (Format::Csv, false) => comparison_csv(&c)?,
                (Format::Csv, true) => attribution_csv(&a)?,
            };
            (text, true)
        }
    })
}

fn toml_value(t: &xbar_arch::Toggles) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(t)?)
}

fn render(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn fail(record: &ErrorRecord, code: u8) -> ExitCode {
    let line = serde_json::to_string(record).unwrap_or_else(|_| record.message.clone());
    eprintln!("{line}");
    ExitCode::from(code)
}

/// Parses arguments, runs the command and maps failures to exit codes:
/// 1 for runtime failures, 2 for usage errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            return fail(&ErrorRecord::new("usage", first.to_string()), 2);
        }
    };
    let result = execute(&cli).and_then(|(text, ok)| {
        emit(&cli.output, &text)?;
        if ok {
            Ok(())
        } else {
            bail!(Failed("one or more equivalence suites failed".into()))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = ErrorRecord::from_error(&e);
            let code = if record.kind == "usage" { 2 } else { 1 };
            fail(&record, code)
        }
    }
}
