//! `rootspan` command-line front end: runs verification suites and BVP
//! experiments from config files and writes JSON reports plus CSV tables.
//!
//! Exit status: 0 when every asserted check holds, 1 when one fails,
//! 2 for invalid input (config, flags, plot kind), 3 for a numerical failure.

pub mod config;
pub mod plot;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::config::SuiteConfig;
use crate::report::Report;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, flags or report input.
    Config(String),
    /// A library call failed inside the named check.
    Numeric { check: String, message: String },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric { check, message } => write!(f, "numerical failure in check '{check}': {message}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Tags a library error with the check it occurred in.
pub trait During<T> {
    fn during(self, check: &str) -> Result<T, CliError>;
}

impl<T> During<T> for rootspan_core::Result<T> {
    fn during(self, check: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Numeric {
            check: check.to_string(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "rootspan", version, about = "Finite-section spectral verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite (schatten, trace, resolvent, completeness, bvp).
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary value problem experiments.
    Bvp {
        #[command(subcommand)]
        action: BvpAction,
    },
    /// Write a plot-ready CSV table from a report series.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        kind: String,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BvpAction {
    /// Discretize the configured problem once and analyse its spectrum.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const DEFAULT_OUT: &str = "rootspan-out";

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn load_config(path: Option<&Path>, suite: &str) -> Result<SuiteConfig, CliError> {
    let cfg = match path {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::for_suite(suite),
    };
    if cfg.suite != suite {
        return Err(CliError::Config(format!(
            "config is for suite '{}', not '{suite}'",
            cfg.suite
        )));
    }
    Ok(cfg)
}

/// Writes `report.json` and one CSV per series into `out`.
pub fn write_outputs(report: &Report, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let json_path = out.join("report.json");
    std::fs::write(&json_path, report.to_json()).map_err(|e| io_err(&json_path, e))?;
    let mut written = vec![json_path];
    let value = report.to_value();
    for kind in report.series.keys() {
        let csv = plot::render(&value, kind)?;
        let path = out.join(format!("{kind}.csv"));
        std::fs::write(&path, csv).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn finish(report: &Report, out: &Path) -> Result<i32, CliError> {
    let written = write_outputs(report, out)?;
    let s = report.summary;
    println!(
        "{}: {} records, {} asserted, {} failed; report-only {} ({} not holding)",
        report.suite, s.total, s.asserted, s.asserted_failed, s.report_only, s.report_only_failed
    );
    for path in &written {
        println!("wrote {}", path.display());
    }
    for r in report.failed_asserted() {
        eprintln!("FAILED {}: observed {:e}, bound {:e}", r.name, r.observed, r.bound);
    }
    Ok(if report.all_asserted_hold() { 0 } else { 1 })
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify { suite, config, seed, out } => {
            let mut cfg = load_config(config.as_deref(), &suite)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            cfg.validate()?;
            let out = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| DEFAULT_OUT.into());
            let report = suites::run_suite(&cfg)?;
            finish(&report, &out)
        }
        Command::Bvp {
            action: BvpAction::Run { config, n, out },
        } => {
            let cfg = load_config(config.as_deref(), "bvp")?;
            cfg.validate()?;
            let out = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| DEFAULT_OUT.into());
            let report = suites::run_bvp_experiment(&cfg, n)?;
            finish(&report, &out)
        }
        Command::Plot { report, kind, out } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", report.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", report.display())))?;
            let csv = plot::render(&value, &kind)?;
            match out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| io_err(&path, e))?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rootspan: {e}");
            e.exit_code()
        }
    }
}
