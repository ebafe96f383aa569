//! `<name>.csv` and `<name>.manifest.json`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use dqd_sim::protocol::ProtocolParams;

use crate::config::RunConfig;
use crate::run::Row;
use crate::CliError;

/// CSV and manifest paths for an output stem; a trailing `.csv` is dropped.
pub fn output_paths(output: &Path) -> (PathBuf, PathBuf) {
    let s = output.to_string_lossy();
    let stem = s.strip_suffix(".csv").unwrap_or(&s);
    (PathBuf::from(format!("{stem}.csv")), PathBuf::from(format!("{stem}.manifest.json")))
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(name, _)| *name)).map_err(|e| io(path, e))?;
    }
    for row in rows {
        w.write_record(row.iter().map(|(_, cell)| cell.render())).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "dqd-sim")]
    library: &'static str,
    #[serde(rename = "dqd-sim-cli")]
    cli: &'static str,
}

/// Provenance written next to the CSV; contains nothing run-to-run variable.
#[derive(Serialize)]
pub struct Manifest<'a> {
    csv: String,
    config: &'a RunConfig,
    /// Parameters each row actually ran with, in row order.
    resolved: &'a [ProtocolParams],
    seed: Option<u64>,
    columns: Vec<&'static str>,
    rows: usize,
    warnings: &'a [String],
    versions: Versions,
}

impl<'a> Manifest<'a> {
    pub fn new(csv: &Path, config: &'a RunConfig, resolved: &'a [ProtocolParams], rows: &[Row], warnings: &'a [String]) -> Self {
        Manifest {
            csv: csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            config,
            resolved,
            seed: config.seed,
            columns: rows.first().map(|r| r.iter().map(|(n, _)| *n).collect()).unwrap_or_default(),
            rows: rows.len(),
            warnings,
            versions: Versions { library: dqd_sim::VERSION, cli: env!("CARGO_PKG_VERSION") },
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| io(path, e))?;
        std::fs::write(path, text + "\n").map_err(|e| io(path, e))
    }
}
