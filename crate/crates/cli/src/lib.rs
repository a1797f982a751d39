//! `randpolar` command-line driver.
//!
//! Every command reads a JSON configuration, writes `report.json`
//! (`{command, config, verdict, summary, timing}`) plus plot-ready CSV files
//! to the output directory, and exits with `0` on PASS, `1` on FAIL, `2` on
//! an invalid or infeasible configuration and `3` on I/O errors.
//! `timing` holds deterministic work counters, so reruns with the same flags
//! produce byte-identical reports for any `--threads`; wall-clock time goes
//! to `timing.json`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod spec;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

pub use commands::{execute, Outcome, Overrides};
pub use spec::{parse_experiment_config, ConfigError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Estimate ν(K°) for one body.
    PolarVolume,
    /// Expected polar measure, random points vs uniform points of D_n.
    Santalo,
    /// Survival-curve ordering of the same comparison.
    Dominance,
    /// Polar measures along one growing path of uniform points of D_n.
    Converge,
    /// Convexity of 1/ν(K_t°) along a shadow system.
    Shadow,
    /// Triangle inequality of the Busemann gauge on seeded pairs.
    Busemann,
    /// Homogeneity and subadditivity of the Ball–Bobkov or Milman–Pajor gauge.
    Gauge,
    /// Convexity of the Brunn-type profile Φ(t).
    Brunn,
    /// Rearrangement inequality on one-dimensional step functions.
    Rbll,
    /// Polar measures of L_p-centroid bodies, μ vs uniform on D_n.
    Centroid,
    /// Polar measure of K vs the ball of the same volume.
    Newsan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PolarVolume => "polar-volume",
            Command::Santalo => "santalo",
            Command::Dominance => "dominance",
            Command::Converge => "converge",
            Command::Shadow => "shadow",
            Command::Busemann => "busemann",
            Command::Gauge => "gauge",
            Command::Brunn => "brunn",
            Command::Rbll => "rbll",
            Command::Centroid => "centroid",
            Command::Newsan => "newsan",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "randpolar", version, about = "Polar measures of random convex bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file (optional for `rbll`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Replace the configuration's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replace the configuration's sample budget.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads; affects speed only, never results.
    #[arg(long, global = true)]
    pub threads: Option<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot compute: {0}")]
    Compute(randpolar_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Compute(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a Value,
    verdict: randpolar_core::experiments::Verdict,
    summary: &'a Value,
    timing: &'a Value,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn read_config(cli: &Cli) -> Result<String, CliError> {
    match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(io_err(p)),
        None if cli.command == Command::Rbll => Ok("{}".into()),
        None => Err(ConfigError::new("--config", "is required for this command").into()),
    }
}

/// Write `report.json`, the CSV files and `timing.json`.
pub fn write_outputs(out: &Path, command: Command, outcome: &Outcome, seconds: f64, threads: usize) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let report = Report {
        command: command.name(),
        config: &outcome.config,
        verdict: outcome.verdict,
        summary: &outcome.summary,
        timing: &outcome.timing,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    let path = out.join("report.json");
    std::fs::write(&path, text).map_err(io_err(&path))?;
    for (name, contents) in &outcome.files {
        let path = out.join(name);
        std::fs::write(&path, contents).map_err(io_err(&path))?;
    }
    let timing = serde_json::json!({ "command": command.name(), "wall_clock_seconds": seconds, "threads": threads });
    let path = out.join("timing.json");
    std::fs::write(&path, format!("{timing:#}\n")).map_err(io_err(&path))
}

fn run_inner(cli: &Cli) -> Result<Outcome, CliError> {
    let text = read_config(cli)?;
    let ov = Overrides { seed: cli.seed, budget: cli.budget };
    let threads = cli.threads.map(|t| t.max(1) as usize).unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let outcome = pool.install(|| execute(cli.command, &text, ov))?;
    write_outputs(&cli.out, cli.command, &outcome, start.elapsed().as_secs_f64(), threads)?;
    Ok(outcome)
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(outcome) => {
            println!("{}: {:?}", cli.command.name(), outcome.verdict);
            if outcome.verdict.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("randpolar {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
