//! Batch front-end: `hexweb <command> --config <file> [--out <dir>] [--seed <n>] [--strict]`.
//!
//! Exit codes: 0 all suites pass, 1 suite failure, 2 usage or schema error,
//! 3 strict validation failure.

pub mod config;
pub mod report;
pub mod suites;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::frobenius::associativity_residual;
use config::{parse_config, Input, JobConfig};
use report::{sha256_hex, write_report, Invariant, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("strict validation failed: associativity residual {residual:e} exceeds {tol:e}")]
    Strict { residual: f64, tol: f64 },
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Compute(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Strict { .. } => 3,
            CliError::Compute(_) => 1,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Gamma,
    Leaves,
    Closure,
    Discriminant,
    Normalforms,
    Classify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Gamma => "gamma",
            Command::Leaves => "leaves",
            Command::Closure => "closure",
            Command::Discriminant => "discriminant",
            Command::Normalforms => "normalforms",
            Command::Classify => "classify",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hexweb", version, about = "Flatness, symmetry and singularity checks for 3-webs")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON job configuration (optional for `normalforms`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reject potentials that fail an associativity spot check.
    #[arg(long)]
    pub strict: bool,
}

/// Result of one command before it is wrapped into a report.
pub struct Outcome {
    pub invariants: Vec<Invariant>,
    pub artifacts: Vec<String>,
    pub details: Option<serde_json::Value>,
}

fn strict_check(cfg: &JobConfig, seed: u64) -> Result<(), CliError> {
    let Input::Potential(pot) = &cfg.input else { return Ok(()) };
    let field = cfg.input.field()?;
    let mut rng = suites::rng(seed);
    let pts = suites::sample_points(&field, cfg.window, 5, 0.0, &mut rng);
    let tol = cfg.tol("strict");
    let mut worst: f64 = 0.0;
    for p in pts {
        worst = worst.max(associativity_residual(pot, p)?.norm());
    }
    if worst > tol {
        return Err(CliError::Strict { residual: worst, tol });
    }
    Ok(())
}

/// Runs a parsed command; returns the written report.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let (cfg, hash) = match &cli.config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Schema("config is not UTF-8".into()))?;
            (parse_config(&text)?, sha256_hex(&bytes))
        }
        None if cli.command == Command::Normalforms => (JobConfig::catalog_default(), sha256_hex(b"")),
        None => return Err(CliError::Usage(format!("{} requires --config <file>", cli.command.name()))),
    };
    if cli.strict {
        strict_check(&cfg, cli.seed)?;
    }
    let out: &Path = &cli.out;
    let outcome = match cli.command {
        Command::Check => suites::check(&cfg, cli.seed)?,
        Command::Gamma => suites::gamma(&cfg, out)?,
        Command::Leaves => suites::leaves(&cfg, out)?,
        Command::Closure => suites::closure(&cfg)?,
        Command::Discriminant => suites::discriminant_cmd(&cfg, out)?,
        Command::Normalforms => suites::normalforms(&cfg, cli.seed)?,
        Command::Classify => suites::classify(&cfg)?,
    };
    let mut report = Report {
        command: cli.command.name().into(),
        input: cfg.input.describe(),
        config_hash: hash,
        seed: cli.seed,
        tolerances: cfg.tolerances.clone(),
        invariants: outcome.invariants,
        artifacts: outcome.artifacts,
        details: outcome.details,
        pass: false,
    };
    report.finish();
    report.artifacts.push(format!("{}.json", report.command));
    write_report(out, &report)?;
    Ok(report)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            for inv in &report.invariants {
                let value = inv.value.map_or("-".to_string(), |v| format!("{v:.3e}"));
                println!("{} {:<40} {value}", if inv.pass { "PASS" } else { "FAIL" }, inv.name);
            }
            println!("{}: {}", report.command, if report.pass { "pass" } else { "FAIL" });
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("hexweb: {e}");
            e.exit_code()
        }
    }
}
