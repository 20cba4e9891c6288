//! Dispatch from a resolved configuration to the matching runner.

use std::path::{Path, PathBuf};

use compnet::aco::Colony;
use compnet::ann::{AnnTrainer, Mlp};
use compnet::eca::{rule_table, EcaNetwork, Tape};
use compnet::meta::{meta_run, AcoTarget, PsoTarget};
use compnet::pso::{BenchmarkObjective, Swarm};
use compnet::{run, RngStream, RunRecord};

use crate::config::{load_dataset, load_instances, Architecture, RunConfig};
use crate::cross::{cross_train, CrossConfig};
use crate::error::{HarnessError, Result};
use crate::records::write_records;

/// Record file next to the config: `exp.json` becomes `exp.jsonl`.
pub fn default_output(config_path: &Path) -> PathBuf {
    config_path.with_extension("jsonl")
}

/// Runs a resolved configuration and returns its records without touching
/// the file system beyond reading inputs.
pub fn run_config(config: &RunConfig) -> Result<Vec<RunRecord>> {
    let schedule = config.schedule();
    let seed = config.seed();
    let mut rng = RngStream::new(seed);

    if let Some(meta) = &config.meta {
        let meta_cfg = meta.meta_config(schedule.meta_generations);
        let search = meta.search();
        let outcome = match config.architecture() {
            Architecture::Aco => {
                let aco = config.aco.as_ref().unwrap();
                let target = AcoTarget {
                    instances: load_instances(&aco.graph)?,
                    base: aco.params,
                };
                meta_run(&meta_cfg, &target, &search, seed)?
            }
            Architecture::Pso => {
                let pso = config.pso.as_ref().unwrap();
                let target = PsoTarget {
                    objective: benchmark(config)?,
                    bounds: pso.bounds.unwrap(),
                    base: pso.params.clone(),
                };
                meta_run(&meta_cfg, &target, &search, seed)?
            }
            other => return Err(HarnessError::Config(format!("meta: not available for {other:?}"))),
        };
        return Ok(outcome.records);
    }

    let records = match config.architecture() {
        Architecture::Eca => {
            let eca = config.eca.as_ref().unwrap();
            let tape = match &eca.initial {
                Some(bits) => Tape::new(bits.bytes().map(|b| b - b'0').collect(), eca.boundary)?,
                None => Tape::single_one(eca.width, eca.boundary)?,
            };
            let mut net = EcaNetwork::new(&tape, rule_table(eca.rule)?)?.with_updating(eca.updating);
            run(&mut net, &schedule, &mut rng)?
        }
        Architecture::Ann => {
            let ann = config.ann.as_ref().unwrap();
            let dataset = load_dataset(&ann.dataset)?;
            let mlp = Mlp::new(&ann.layers, ann.hidden_activation, ann.output_activation, &mut rng)?
                .with_updating(ann.updating);
            let mut trainer = AnnTrainer::new(mlp, dataset, ann.learning_rate)?;
            run(&mut trainer, &schedule, &mut rng)?
        }
        Architecture::Aco => {
            let aco = config.aco.as_ref().unwrap();
            let instance = load_instances(&aco.graph)?.remove(0);
            let mut colony = Colony::new(instance, aco.params)?;
            run(&mut colony, &schedule, &mut rng)?
        }
        Architecture::Pso => {
            let pso = config.pso.as_ref().unwrap();
            match &config.cross {
                Some(cross) => {
                    let cc = CrossConfig {
                        layers: cross.layers.clone(),
                        hidden_activation: cross.hidden_activation,
                        output_activation: cross.output_activation,
                        dataset: load_dataset(&cross.dataset)?,
                        pso: pso.params.clone(),
                        dimension: pso.dimension.unwrap_or_default(),
                        bounds: pso.bounds.unwrap(),
                        updating: pso.updating,
                    };
                    cross_train(&cc, &schedule, &mut rng)?.records
                }
                None => {
                    let mut swarm = Swarm::new(benchmark(config)?, pso.params.clone(), pso.bounds.unwrap(), &mut rng)?
                        .with_updating(pso.updating);
                    run(&mut swarm, &schedule, &mut rng)?
                }
            }
        }
    };
    Ok(records)
}

fn benchmark(config: &RunConfig) -> Result<BenchmarkObjective> {
    let pso = config.pso.as_ref().unwrap();
    match (pso.objective, pso.dimension) {
        (Some(function), Some(dimension)) => Ok(BenchmarkObjective { function, dimension }),
        _ => Err(HarnessError::Config("pso.objective and pso.dimension are required".into())),
    }
}

/// Runs `config` and writes the record file to `out`.
pub fn execute(config: &RunConfig, out: &Path) -> Result<Vec<RunRecord>> {
    let records = run_config(config)?;
    write_records(out, config, &records)?;
    Ok(records)
}
