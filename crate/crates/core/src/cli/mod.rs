//! Command-line front end: `simulate`, `reconstruct`, `select-rank`,
//! `benchmark-grid` and `correlators`.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 numerical failure.

pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use config::{apply_override, load_table, resolve, set_key, ConfigError, RunConfig};
use manifest::{digest_input, timestamp, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cstomo", version, about = "Compressed-sensing state tomography with bootstrap rank selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set estimator.mu=0.1`.
    #[arg(long = "set", global = true, value_name = "K=V")]
    pub set: Vec<String>,
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Parallel jobs for bootstrap replicas and grid cells.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Pure reference state (amplitude JSON) for fidelity reports.
    #[arg(long, global = true, value_name = "PATH")]
    pub reference: Option<PathBuf>,
    /// grad, ls_pg, lasso or tnm.
    #[arg(long, global = true, value_name = "NAME")]
    pub estimator: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate Pauli-basis counts for a state.
    Simulate,
    /// Reconstruct a state from a counts file.
    Reconstruct {
        /// Counts CSV (overrides `reconstruct.counts`).
        counts: Option<PathBuf>,
    },
    /// Bootstrap rank selection on a counts file.
    SelectRank {
        /// Counts CSV (overrides `select_rank.counts`).
        counts: Option<PathBuf>,
    },
    /// Rank-selection simulation grid.
    BenchmarkGrid,
    /// Pauli correlators from a counts file.
    Correlators {
        /// Counts CSV (overrides `correlators.counts`).
        counts: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Reconstruct { .. } => "reconstruct",
            Command::SelectRank { .. } => "select-rank",
            Command::BenchmarkGrid => "benchmark-grid",
            Command::Correlators { .. } => "correlators",
        }
    }

    fn section(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Reconstruct { .. } => "reconstruct",
            Command::SelectRank { .. } => "select_rank",
            Command::BenchmarkGrid => "grid",
            Command::Correlators { .. } => "correlators",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.0)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Run(e) => match e {
                Error::Argument(_) => EXIT_USAGE,
                Error::DimensionMismatch { .. } | Error::Data(_) | Error::Io(_) | Error::Json(_) => EXIT_DATA,
                Error::EigenNoConvergence { .. }
                | Error::Diverged { .. }
                | Error::Infeasible { .. }
                | Error::Degenerate(_)
                | Error::Numerical(_) => EXIT_NUMERICAL,
            },
        }
    }
}

/// Resolves the configuration: file, then `--set`, then dedicated flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut table = load_table(cli.config.as_deref())?;
    for s in &cli.set {
        apply_override(&mut table, s)?;
    }
    let path_value = |p: &PathBuf| toml::Value::String(p.to_string_lossy().into_owned());
    if let Some(seed) = cli.seed {
        let seed = i64::try_from(seed).map_err(|_| CliError::Usage(format!("--seed {seed} exceeds {}", i64::MAX)))?;
        set_key(&mut table, "seed", toml::Value::Integer(seed))?;
    }
    if let Some(w) = cli.workers {
        set_key(&mut table, "workers", toml::Value::Integer(w as i64))?;
    }
    let section = cli.command.section();
    if let Some(name) = &cli.estimator {
        if matches!(cli.command, Command::Simulate | Command::Correlators { .. }) {
            return Err(CliError::Usage(format!("--estimator does not apply to {}", cli.command.name())));
        }
        set_key(&mut table, &format!("{section}.estimator"), toml::Value::String(name.clone()))?;
    }
    if let Some(r) = &cli.reference {
        if !matches!(cli.command, Command::Reconstruct { .. } | Command::SelectRank { .. }) {
            return Err(CliError::Usage(format!("--reference does not apply to {}", cli.command.name())));
        }
        set_key(&mut table, &format!("{section}.reference"), path_value(r))?;
    }
    match &cli.command {
        Command::Reconstruct { counts: Some(p) } | Command::SelectRank { counts: Some(p) } | Command::Correlators { counts: Some(p) } => {
            set_key(&mut table, &format!("{section}.counts"), path_value(p))?;
        }
        _ => {}
    }
    let cfg = resolve(table)?;
    if cfg.workers == 0 {
        return Err(CliError::Usage("workers must be at least 1".into()));
    }
    Ok(cfg)
}

/// Runs a parsed command line, writing outputs and the manifest to `--out`.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let started_at = timestamp();
    let cfg = resolve_config(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(Error::from)?;
    let out = &cli.out;
    let result = match &cli.command {
        Command::Simulate => commands::simulate(&cfg, out)?,
        Command::Reconstruct { .. } => commands::reconstruct(&cfg, out)?,
        Command::SelectRank { .. } => commands::select_rank(&cfg, out)?,
        Command::BenchmarkGrid => commands::benchmark_grid(&cfg, out)?,
        Command::Correlators { .. } => commands::correlators(&cfg, out)?,
    };
    let mut inputs = result.inputs;
    if let Some(p) = &cli.config {
        inputs.insert(0, digest_input("config", p)?);
    }
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(&cfg).map_err(Error::from)?,
        seed: cfg.seed,
        inputs,
        outputs: result.outputs,
        started_at,
        finished_at: timestamp(),
    };
    manifest.write(out)?;
    Ok(())
}

/// Parses `args` (program name first), runs, reports errors on stderr and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
