use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Architecture;
use crate::error::{HarnessError, Result};
use crate::records::read_records;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub file: String,
    pub architecture: Architecture,
    pub seed: u64,
    pub final_best: f64,
    /// Slow steps (or meta generations) completed.
    pub iterations: usize,
    pub wall_clock_ms: f64,
}

pub fn summarize_file(path: &Path) -> Result<SummaryRow> {
    let (header, records) = read_records(path)?;
    let last = records
        .last()
        .ok_or_else(|| HarnessError::Io(format!("{}: no records", path.display())))?;
    let architecture = header
        .config
        .architecture
        .ok_or_else(|| HarnessError::Io(format!("{}: header has no architecture", path.display())))?;
    Ok(SummaryRow {
        file: path.display().to_string(),
        architecture,
        seed: header.config.seed.unwrap_or_default(),
        final_best: last.best_value,
        iterations: last.slow_step,
        wall_clock_ms: last.wall_clock_ms,
    })
}

/// One row per record file, ordered by path.
pub fn summarize(paths: &[PathBuf]) -> Result<Vec<SummaryRow>> {
    let mut sorted = paths.to_vec();
    sorted.sort();
    sorted.iter().map(|p| summarize_file(p)).collect()
}

pub fn summarize_glob(pattern: &str) -> Result<Vec<SummaryRow>> {
    let paths = glob::glob(pattern)
        .map_err(|e| HarnessError::Config(format!("bad glob {pattern:?}: {e}")))?
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    summarize(&paths)
}

pub fn to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["file", "architecture", "seed", "final_best", "iterations", "wall_clock_ms"])
            .map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
