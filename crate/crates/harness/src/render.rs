//! Space-time diagrams for ECA configurations.

use std::path::{Path, PathBuf};

use compnet::eca::{evolve, rule_table, Grid, Tape};

use crate::config::{Architecture, RunConfig};
use crate::error::{HarnessError, Result};

/// The grid an ECA configuration produces: the initial row plus `steps`
/// further rows.
pub fn eca_grid(config: &RunConfig) -> Result<Grid> {
    let eca = match (config.architecture(), &config.eca) {
        (Architecture::Eca, Some(eca)) => eca,
        (other, _) => return Err(HarnessError::Config(format!("eca-render needs an eca config, got {other:?}"))),
    };
    let tape = match &eca.initial {
        Some(bits) => Tape::new(bits.bytes().map(|b| b - b'0').collect(), eca.boundary)?,
        None => Tape::single_one(eca.width, eca.boundary)?,
    };
    Ok(evolve(&tape, &rule_table(eca.rule)?, eca.steps)?)
}

/// Writes `<stem>.txt` and `<stem>.pbm`, returning both paths.
pub fn render(config: &RunConfig, stem: &Path) -> Result<(PathBuf, PathBuf)> {
    let grid = eca_grid(config)?;
    let txt = stem.with_extension("txt");
    let pbm = stem.with_extension("pbm");
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&txt, grid.to_text()).map_err(|e| HarnessError::Io(format!("{}: {e}", txt.display())))?;
    std::fs::write(&pbm, grid.to_pbm()).map_err(|e| HarnessError::Io(format!("{}: {e}", pbm.display())))?;
    Ok((txt, pbm))
}
