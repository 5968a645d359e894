//! Config-driven experiment harness behind the `gibbs-sos` binary.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use config::{parse_config, ConfigError, ExperimentConfig, RawConfig};
pub use experiments::{describe, run_experiment, EXPERIMENTS};
pub use output::{output_dir, write_artifacts, Cell, Check, Outcome, Table, OUT_ENV};

use crate::error::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECKS_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const UNKNOWN_EXPERIMENT: i32 = 3;
    pub const CAPACITY: i32 = 4;
    pub const RUNTIME: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    UnknownExperiment(String),
    Run(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::UnknownExperiment(_) => exit::UNKNOWN_EXPERIMENT,
            CliError::Run(Error::Capacity { .. }) => exit::CAPACITY,
            CliError::Run(_) | CliError::Io(_) => exit::RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::UnknownExperiment(name) => {
                let known: Vec<&str> = EXPERIMENTS.iter().map(|e| e.0).collect();
                write!(f, "unknown experiment {name:?}; known: {}", known.join(", "))
            }
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Read, parse and resolve a config file.
pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(ConfigError { message: format!("{}: {e}", path.display()), line: None, column: None }))?;
    load_str(&text)
}

pub fn load_str(text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg = parse_config(text).map_err(CliError::Config)?.resolve().map_err(CliError::Config)?;
    if !cfg.is_registered() {
        return Err(CliError::UnknownExperiment(cfg.experiment));
    }
    Ok(cfg)
}

/// Run the experiment and write its artifacts; the outcome carries the checks.
pub fn run(cfg: &ExperimentConfig) -> Result<(Outcome, std::path::PathBuf), CliError> {
    let outcome = run_experiment(cfg).map_err(CliError::Run)?;
    let dir = output_dir(cfg);
    write_artifacts(&dir, cfg, &outcome).map_err(CliError::Io)?;
    Ok((outcome, dir))
}
