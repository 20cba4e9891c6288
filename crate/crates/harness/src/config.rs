//! Run configuration: a JSON document with one architecture section.
//!
//! Unknown keys are errors. [`load_config`] validates the document and fills
//! every default so the resolved configuration can be echoed verbatim into the
//! record file header.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use compnet::aco::{AcoParams, GraphFormat, TspInstance};
use compnet::ann::{Activation, Dataset, Mlp};
use compnet::eca::Boundary;
use compnet::meta::{MetaConfig, SearchBox};
use compnet::network::Updating;
use compnet::pso::{Benchmark, PsoParams};
use compnet::rng::RngStream;
use compnet::ScaleSchedule;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Environment variable consulted when neither the file nor the command line
/// gives a seed.
pub const SEED_ENV: &str = "CN_SEED";

/// Dataset reference naming the built-in XOR examples.
pub const BUILTIN_XOR: &str = "builtin:xor";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    Ann,
    Aco,
    Pso,
    Eca,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub architecture: Option<Architecture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScaleSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ann: Option<AnnSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aco: Option<AcoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eca: Option<EcaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<MetaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<CrossSection>,
}

fn default_learning_rate() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnSection {
    pub layers: Vec<usize>,
    /// CSV path or `builtin:xor`.
    pub dataset: String,
    #[serde(default)]
    pub hidden_activation: Activation,
    #[serde(default)]
    pub output_activation: Activation,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default)]
    pub updating: Updating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    File { path: PathBuf, format: GraphFormat },
    /// Cities uniform in the unit square, drawn from their own seed.
    RandomEuclidean {
        cities: usize,
        seed: u64,
        #[serde(default = "one")]
        instances: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcoSection {
    pub graph: GraphSource,
    #[serde(default)]
    pub params: AcoParams,
    /// Only `synchronous` is accepted: pheromone updates are batch updates.
    #[serde(default)]
    pub updating: Updating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsoSection {
    /// Named objective; absent when a `cross` section supplies the objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Benchmark>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(f64, f64)>,
    #[serde(default)]
    pub params: PsoParams,
    #[serde(default)]
    pub updating: Updating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EcaSection {
    pub rule: i64,
    pub width: usize,
    pub steps: i64,
    #[serde(default)]
    pub boundary: Boundary,
    /// Initial cells as a `0`/`1` string; absent means a single 1 at the centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default)]
    pub updating: Updating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaSection {
    pub search_box: BTreeMap<String, (f64, f64)>,
    #[serde(default = "MetaSection::default_population")]
    pub population: usize,
    #[serde(default = "MetaSection::default_tournament")]
    pub tournament: usize,
    #[serde(default = "MetaSection::default_mutation")]
    pub mutation_scale: f64,
    #[serde(default = "MetaSection::default_crossover")]
    pub crossover_rate: f64,
    /// Slow steps per inner run; defaults to `schedule.slow_steps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default = "MetaSection::default_seeds")]
    pub seeds: Vec<u64>,
}

impl MetaSection {
    fn default_population() -> usize {
        MetaConfig::default().population
    }
    fn default_tournament() -> usize {
        MetaConfig::default().tournament
    }
    fn default_mutation() -> f64 {
        MetaConfig::default().mutation_scale
    }
    fn default_crossover() -> f64 {
        MetaConfig::default().crossover_rate
    }
    fn default_seeds() -> Vec<u64> {
        MetaConfig::default().seeds
    }

    pub fn meta_config(&self, generations: usize) -> MetaConfig {
        MetaConfig {
            population: self.population,
            generations,
            tournament: self.tournament,
            mutation_scale: self.mutation_scale,
            crossover_rate: self.crossover_rate,
            budget: self.budget.unwrap_or_default(),
            seeds: self.seeds.clone(),
        }
    }

    pub fn search(&self) -> SearchBox {
        self.search_box.clone()
    }
}

fn default_cross_bounds() -> (f64, f64) {
    (-1.0, 1.0)
}

/// An ANN trained by the PSO section: particle positions are flattened
/// weight vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossSection {
    pub layers: Vec<usize>,
    pub dataset: String,
    #[serde(default)]
    pub hidden_activation: Activation,
    #[serde(default)]
    pub output_activation: Activation,
}

impl RunConfig {
    pub fn architecture(&self) -> Architecture {
        self.architecture.expect("resolved config")
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or_default()
    }

    pub fn schedule(&self) -> ScaleSchedule {
        self.schedule.expect("resolved config")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Reads, validates and resolves a configuration file, taking the fallback
/// seed from `CN_SEED`.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<u64>()
                .map_err(|_| HarnessError::config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
        ),
        Err(_) => None,
    };
    load_config_with(path, env_seed)
}

/// As [`load_config`] with an explicit fallback seed.
pub fn load_config_with(path: impl AsRef<Path>, env_seed: Option<u64>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let parsed = parse_config(&text).map_err(|e| match e {
        HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    resolve(parsed, base, env_seed)
}

/// Parses JSON text, reporting the offending field path and position.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            HarnessError::config(inner.to_string())
        } else {
            HarnessError::config(format!("field `{path}`: {inner}"))
        }
    })
}

fn resolve_file(base: &Path, reference: &str, field: &str) -> Result<String> {
    if reference == BUILTIN_XOR {
        return Ok(reference.to_string());
    }
    let candidate = base.join(reference);
    let absolute = candidate
        .canonicalize()
        .map_err(|e| HarnessError::config(format!("{field}: {} does not exist ({e})", candidate.display())))?;
    Ok(absolute.to_string_lossy().into_owned())
}

pub fn load_dataset(reference: &str) -> Result<Dataset> {
    if reference == BUILTIN_XOR {
        return Ok(Dataset::xor());
    }
    Ok(Dataset::from_path(reference)?)
}

/// Instances named by an ACO graph source.
pub fn load_instances(source: &GraphSource) -> Result<Vec<TspInstance>> {
    match source {
        GraphSource::File { path, format } => Ok(vec![TspInstance::from_path(path, *format)?]),
        GraphSource::RandomEuclidean { cities, seed, instances } => {
            let mut rng = RngStream::new(*seed);
            (0..*instances)
                .map(|_| TspInstance::random_euclidean(*cities, &mut rng).map_err(HarnessError::from))
                .collect()
        }
    }
}

fn validate_layers(layers: &[usize], field: &str) -> Result<usize> {
    Mlp::zeros(layers, Activation::Identity, Activation::Identity)
        .map(|m| m.parameter_count())
        .map_err(|e| HarnessError::config(format!("{field}: {e}")))
}

const ACO_META_KEYS: &[&str] = &["alpha", "beta", "rho", "q", "ants", "tau0"];
const PSO_META_KEYS: &[&str] = &["omega", "c1", "c2", "v_max"];

/// Checks a parsed configuration and fills every default.
pub fn resolve(mut cfg: RunConfig, base: &Path, env_seed: Option<u64>) -> Result<RunConfig> {
    let present: Vec<Architecture> = [
        (cfg.ann.is_some(), Architecture::Ann),
        (cfg.aco.is_some(), Architecture::Aco),
        (cfg.pso.is_some(), Architecture::Pso),
        (cfg.eca.is_some(), Architecture::Eca),
    ]
    .into_iter()
    .filter_map(|(p, a)| p.then_some(a))
    .collect();
    let arch = match present.as_slice() {
        [one] => *one,
        [] => return Err(HarnessError::config("one of the sections ann, aco, pso, eca is required")),
        many => {
            return Err(HarnessError::config(format!(
                "exactly one architecture section is allowed, found {many:?}"
            )))
        }
    };
    if let Some(declared) = cfg.architecture {
        if declared != arch {
            return Err(HarnessError::config(format!(
                "architecture: declared {declared:?} but the config has a {arch:?} section"
            )));
        }
    }
    cfg.architecture = Some(arch);
    cfg.seed = cfg.seed.or(env_seed).or(Some(0));

    if cfg.cross.is_some() && arch != Architecture::Pso {
        return Err(HarnessError::config("cross: requires a pso section (the outer optimiser)"));
    }
    if cfg.meta.is_some() && cfg.cross.is_some() {
        return Err(HarnessError::config("meta and cross sections cannot be combined"));
    }

    let default_schedule = match arch {
        Architecture::Ann => {
            let ann = cfg.ann.as_mut().unwrap();
            validate_layers(&ann.layers, "ann.layers")?;
            if !(ann.learning_rate >= 0.0) {
                return Err(HarnessError::config("ann.learning_rate must be >= 0"));
            }
            ann.dataset = resolve_file(base, &ann.dataset, "ann.dataset")?;
            let data = load_dataset(&ann.dataset)?;
            if data.input_arity() != ann.layers[0] || data.target_arity() != *ann.layers.last().unwrap() {
                return Err(HarnessError::config(format!(
                    "ann.layers {:?} do not match dataset arities ({}, {})",
                    ann.layers,
                    data.input_arity(),
                    data.target_arity()
                )));
            }
            ScaleSchedule::new(data.len(), 1000)
        }
        Architecture::Aco => {
            let aco = cfg.aco.as_mut().unwrap();
            if aco.updating != Updating::Synchronous {
                return Err(HarnessError::config(
                    "aco.updating: the colony deposits pheromone in one batch; only synchronous is supported",
                ));
            }
            aco.params
                .validate()
                .map_err(|e| HarnessError::config(e.to_string()))?;
            match &mut aco.graph {
                GraphSource::File { path, .. } => {
                    let resolved = resolve_file(base, &path.to_string_lossy(), "aco.graph.path")?;
                    *path = PathBuf::from(resolved);
                }
                GraphSource::RandomEuclidean { cities, instances, .. } => {
                    if *cities < 3 {
                        return Err(HarnessError::config("aco.graph.random_euclidean.cities must be >= 3"));
                    }
                    if *instances == 0 {
                        return Err(HarnessError::config("aco.graph.random_euclidean.instances must be >= 1"));
                    }
                    if *instances > 1 && cfg.meta.is_none() {
                        return Err(HarnessError::config(
                            "aco.graph: several instances are only meaningful with a meta section",
                        ));
                    }
                }
            }
            ScaleSchedule::new(1, 50)
        }
        Architecture::Pso => {
            let pso = cfg.pso.as_mut().unwrap();
            pso.params
                .validate()
                .map_err(|e| HarnessError::config(e.to_string()))?;
            match cfg.cross.as_mut() {
                Some(cross) => {
                    if pso.objective.is_some() {
                        return Err(HarnessError::config(
                            "pso.objective: must be absent when a cross section supplies the objective",
                        ));
                    }
                    let weights = validate_layers(&cross.layers, "cross.layers")?;
                    cross.dataset = resolve_file(base, &cross.dataset, "cross.dataset")?;
                    let data = load_dataset(&cross.dataset)?;
                    if data.input_arity() != cross.layers[0]
                        || data.target_arity() != *cross.layers.last().unwrap()
                    {
                        return Err(HarnessError::config("cross.layers do not match dataset arities"));
                    }
                    match pso.dimension {
                        Some(d) if d != weights => {
                            return Err(HarnessError::config(format!(
                                "pso.dimension {d} does not equal the ANN parameter count {weights}"
                            )))
                        }
                        _ => pso.dimension = Some(weights),
                    }
                    pso.bounds.get_or_insert(default_cross_bounds());
                }
                None => {
                    let objective = pso
                        .objective
                        .ok_or_else(|| HarnessError::config("pso.objective is required"))?;
                    match pso.dimension {
                        None => return Err(HarnessError::config("pso.dimension is required")),
                        Some(0) => return Err(HarnessError::config("pso.dimension must be >= 1")),
                        Some(_) => {}
                    }
                    pso.bounds.get_or_insert(objective.default_bounds());
                }
            }
            let (lo, hi) = pso.bounds.unwrap();
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(HarnessError::config(format!("pso.bounds [{lo}, {hi}] are empty")));
            }
            ScaleSchedule::new(1, 200)
        }
        Architecture::Eca => {
            let eca = cfg.eca.as_mut().unwrap();
            compnet::eca::rule_table(eca.rule).map_err(|e| HarnessError::config(format!("eca.rule: {e}")))?;
            if eca.width < 3 {
                return Err(HarnessError::config("eca.width must be >= 3"));
            }
            if eca.steps < 1 {
                return Err(HarnessError::config("eca.steps must be >= 1"));
            }
            if let Some(init) = &eca.initial {
                if init.len() != eca.width || !init.chars().all(|c| c == '0' || c == '1') {
                    return Err(HarnessError::config(format!(
                        "eca.initial must be {} characters of 0/1",
                        eca.width
                    )));
                }
            }
            ScaleSchedule::new(1, eca.steps as usize - 1)
        }
    };

    let schedule = cfg.schedule.get_or_insert(default_schedule);
    schedule
        .validate()
        .map_err(|e| HarnessError::config(format!("schedule: {e}")))?;

    match (&mut cfg.meta, schedule.meta_generations) {
        (Some(_), 0) => {
            return Err(HarnessError::config(
                "meta: requires schedule.meta_generations > 0",
            ))
        }
        (None, g) if g > 0 => {
            return Err(HarnessError::config(
                "schedule.meta_generations > 0 requires a meta section",
            ))
        }
        (Some(meta), generations) => {
            let allowed = match arch {
                Architecture::Aco => ACO_META_KEYS,
                Architecture::Pso => PSO_META_KEYS,
                other => {
                    return Err(HarnessError::config(format!(
                        "meta: not available for {other:?} (use aco or pso)"
                    )))
                }
            };
            if meta.search_box.is_empty() {
                return Err(HarnessError::config("meta.search_box is empty"));
            }
            for (k, &(lo, hi)) in &meta.search_box {
                if !allowed.contains(&k.as_str()) {
                    return Err(HarnessError::config(format!(
                        "meta.search_box.{k}: unknown parameter (allowed: {allowed:?})"
                    )));
                }
                if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(HarnessError::config(format!("meta.search_box.{k}: empty range [{lo}, {hi}]")));
                }
            }
            meta.budget.get_or_insert(schedule.slow_steps);
            meta.meta_config(generations)
                .validate()
                .map_err(|e| HarnessError::config(e.to_string()))?;
        }
        (None, _) => {}
    }
    Ok(cfg)
}
