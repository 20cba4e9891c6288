//! Configuration-driven runner for the `compnet` instantiations.
//!
//! A run is described by a JSON file with exactly one of the sections `ann`,
//! `aco`, `pso` or `eca`, optionally a `meta` section (a genetic algorithm
//! over the architecture's parameters) or a `cross` section (a PSO swarm
//! training an ANN). Results go to a JSON Lines record file whose first line
//! holds the fully resolved configuration.

pub mod config;
pub mod cross;
pub mod error;
pub mod execute;
pub mod records;
pub mod render;
pub mod summarize;

pub use config::{load_config, load_config_with, Architecture, RunConfig};
pub use cross::{cross_train, AnnObjective, CrossConfig, CrossOutcome};
pub use error::{HarnessError, Result};
pub use execute::{default_output, execute, run_config};
pub use records::{deterministic_bytes, read_records, write_records};
