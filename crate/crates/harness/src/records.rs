//! JSON Lines record files.
//!
//! Line 1 is a header carrying the resolved configuration. Every further line
//! is one [`RunRecord`]. `wall_clock_ms` is always the last field of a record
//! line so [`deterministic_bytes`] can strip it textually.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use compnet::RunRecord;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};

pub const FORMAT: &str = "cn-records/1";

const WALL_CLOCK_KEY: &str = ",\"wall_clock_ms\":";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub format: String,
    pub config: RunConfig,
}

impl Header {
    /// The header for `config`; the output path is left out so moving a file
    /// does not change its contents.
    pub fn for_config(config: &RunConfig) -> Self {
        let mut config = config.clone();
        config.output = None;
        Self {
            format: FORMAT.to_string(),
            config,
        }
    }
}

pub fn write_records(path: &Path, config: &RunConfig, records: &[RunRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| io_at(path, e))?;
    let mut out = BufWriter::new(file);
    let header = serde_json::to_string(&Header::for_config(config)).expect("header serialises");
    writeln!(out, "{header}").map_err(|e| io_at(path, e))?;
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| HarnessError::Numeric(format!("record {}: {e}", r.slow_step)))?;
        writeln!(out, "{line}").map_err(|e| io_at(path, e))?;
    }
    out.flush().map_err(|e| io_at(path, e))
}

pub fn read_records(path: &Path) -> Result<(Header, Vec<RunRecord>)> {
    let file = std::fs::File::open(path).map_err(|e| io_at(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .ok_or_else(|| HarnessError::Io(format!("{}: empty record file", path.display())))?
        .map_err(|e| io_at(path, e))?;
    let header: Header = serde_json::from_str(&first)
        .map_err(|e| HarnessError::Io(format!("{}: line 1: {e}", path.display())))?;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| io_at(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| HarnessError::Io(format!("{}: line {}: {e}", path.display(), i + 2)))?;
        records.push(r);
    }
    Ok((header, records))
}

/// File contents with every `wall_clock_ms` value removed.
pub fn deterministic_bytes(path: &Path) -> Result<Vec<u8>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_at(path, e))?;
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        match line.rfind(WALL_CLOCK_KEY) {
            Some(at) => {
                out.push_str(&line[..at]);
                out.push('}');
            }
            None => out.push_str(line),
        }
        out.push('\n');
    }
    Ok(out.into_bytes())
}

fn io_at(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}
