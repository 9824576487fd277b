//! Experiment driver behind the `cnstn` binary.
//!
//! Each subcommand reads a strict JSON [`RunConfig`], writes its artifacts to
//! an output directory and always finishes with `summary.json`, which carries
//! the resolved configuration, a SHA-256 hash of the inputs and the command
//! report. Artifacts contain no timestamps, so identical inputs give
//! identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

mod config;
mod roughcheck;
mod simulate;
mod strat;
mod wongzakai;

pub use config::{
    parse_config, ExperimentConfig, GridConfig, NoiseConfig, NoiseKind, OutputConfig, QSpec, RunConfig, TestHooks,
    Tolerances,
};

pub use simulate::signed_terms_nondecreasing;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CNSTN_WORKERS";

pub const SUMMARY_FORMAT: &str = "cnstn-summary";
pub const SUMMARY_VERSION: &str = "1.0";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("blow-up: {0}")]
    BlowUp(String),
    #[error("audit failure: {0}")]
    Audit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit status; the codes are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ConfigError,
    BlowUp,
    AuditFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ConfigError => 1,
            Status::BlowUp => 2,
            Status::AuditFailed => 3,
        }
    }
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Config(_) | CliError::Io(_) => Status::ConfigError,
            CliError::BlowUp(_) => Status::BlowUp,
            CliError::Audit(_) => Status::AuditFailed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Wongzakai,
    Roughcheck,
    Strat,
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Wongzakai => "wongzakai",
            Command::Roughcheck => "roughcheck",
            Command::Strat => "strat",
            Command::Audit => "audit",
        }
    }
}

/// Command-line options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub informative: bool,
}

/// What a command produced: its status and the report placed in the summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { status: Status::Ok, report }
    }

    /// Ok unless `failures` is nonempty and auditing is on.
    fn audited(report: Value, failures: &[String], enforce: bool) -> Self {
        let status = if enforce && !failures.is_empty() { Status::AuditFailed } else { Status::Ok };
        Self { status, report }
    }
}

/// Everything a command needs besides its name.
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub informative: bool,
    pub pool: rayon::ThreadPool,
}

impl Context {
    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Rayon pool sized by `CNSTN_WORKERS`, defaulting to the available cores.
pub fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?,
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}

/// Hex SHA-256 of the canonical JSON of the inputs.
pub fn input_hash(command: Command, config: &RunConfig, informative: bool) -> String {
    let canonical = serde_json::to_vec(&json!({
        "command": command,
        "config": config,
        "informative": informative,
    }))
    .expect("config serializes");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn load(options: &Options) -> Result<(RunConfig, PathBuf), CliError> {
    let text = fs::read_to_string(&options.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", options.config.display())))?;
    let mut config = parse_config(&text, options.informative)?;
    if let Some(seed) = options.seed {
        config.noise.seed = seed;
    }
    let out = options
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cnstn-out"));
    Ok((config, out))
}

fn write_summary(
    out: &Path,
    command: Command,
    config: Option<&RunConfig>,
    informative: bool,
    status: Status,
    report: Value,
) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let summary = json!({
        "format": SUMMARY_FORMAT,
        "version": SUMMARY_VERSION,
        "command": command,
        "status": status,
        "exit_code": status.code(),
        "informative": informative,
        "input_hash": config.map(|c| input_hash(command, c, informative)),
        "config": config,
        "report": report,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(out.join("summary.json"), text + "\n")?;
    Ok(())
}

/// Runs one subcommand and writes its summary. Returns the exit status.
pub fn execute(command: Command, options: &Options) -> Status {
    let (config, out) = match load(options) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("cnstn {}: {e}", command.name());
            if let Some(out) = &options.out {
                let _ = write_summary(out, command, None, options.informative, e.status(), json!({ "error": e.to_string() }));
            }
            return e.status();
        }
    };
    let outcome = worker_pool().and_then(|pool| {
        fs::create_dir_all(&out)?;
        let ctx = Context { config: config.clone(), out: out.clone(), informative: options.informative, pool };
        match command {
            Command::Simulate => simulate::simulate(&ctx),
            Command::Audit => simulate::audit(&ctx),
            Command::Wongzakai => wongzakai::wongzakai(&ctx),
            Command::Roughcheck => roughcheck::roughcheck(&ctx),
            Command::Strat => strat::strat(&ctx),
        }
    });
    let (status, report) = match outcome {
        Ok(o) => (o.status, o.report),
        Err(e) => {
            eprintln!("cnstn {}: {e}", command.name());
            (e.status(), json!({ "error": e.to_string() }))
        }
    };
    if let Err(e) = write_summary(&out, command, Some(&config), options.informative, status, report) {
        eprintln!("cnstn {}: cannot write summary: {e}", command.name());
        return Status::ConfigError;
    }
    status
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
