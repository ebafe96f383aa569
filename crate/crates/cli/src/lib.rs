//! Driver for the `dqd-sim` command: configuration, experiments and artifacts.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use config::{validate_config, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(dqd_sim::Error),
    #[error("simulation failed: {0}")]
    Simulation(dqd_sim::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Simulation(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<dqd_sim::Error> for CliError {
    fn from(e: dqd_sim::Error) -> Self {
        use dqd_sim::Error as E;
        match e {
            e if e.is_numerical() => CliError::Numerical(e),
            E::InvalidParameter(msg) | E::Precondition(msg) => CliError::Config(vec![msg]),
            E::InvalidGraph(list) => CliError::Config(list),
            e @ E::QubitBudget { .. } => CliError::Config(vec![e.to_string()]),
            e => CliError::Simulation(e),
        }
    }
}

/// Worker count from `DQD_SIM_THREADS`; unset or 0 lets the pool decide.
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("DQD_SIM_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(vec![format!("DQD_SIM_THREADS must be a non-negative integer, got `{v}`")])),
        _ => Ok(0),
    }
}

#[derive(Debug)]
pub struct Summary {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
    pub warnings: Vec<String>,
}

/// Validates, runs and writes both artifacts.
pub fn execute(cfg: &RunConfig, threads: usize) -> Result<Summary, CliError> {
    let warnings = validate_config(cfg).map_err(CliError::Config)?;
    let (resolved, rows): (Vec<_>, Vec<_>) = run::run_rows(cfg, threads)?.into_iter().unzip();
    let (csv, manifest) = output::output_paths(&cfg.output);
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    output::write_csv(&csv, &rows)?;
    output::Manifest::new(&csv, cfg, &resolved, &rows, &warnings).write(&manifest)?;
    Ok(Summary { csv, manifest, rows: rows.len(), warnings })
}
