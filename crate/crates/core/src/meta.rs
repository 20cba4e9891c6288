//! The third dynamical scale: a genetic algorithm over the parameters of an
//! inner two-scale run.
//!
//! A genome assigns a value to each parameter named in a search box. Fitness
//! is the mean final best value of the inner run over a fixed set of
//! evaluation seeds, so identical genomes always score identically and a
//! generation's evaluations can run in parallel without changing results.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aco::{AcoParams, Colony, TspInstance};
use crate::error::{CnError, Result};
use crate::pso::{Objective, PsoParams, Swarm};
use crate::rng::RngStream;
use crate::scale::{run, RunRecord, ScaleSchedule};

pub type ParamGenome = BTreeMap<String, f64>;

/// Inclusive `[lo, hi]` range per searched parameter.
pub type SearchBox = BTreeMap<String, (f64, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    /// Mutation standard deviation as a fraction of each box width.
    pub mutation_scale: f64,
    pub crossover_rate: f64,
    /// Slow steps per inner run.
    pub budget: usize,
    pub seeds: Vec<u64>,
}

impl Default for MetaConfig {
    fn default() -> Self {
        Self {
            population: 10,
            generations: 10,
            tournament: 3,
            mutation_scale: 0.1,
            crossover_rate: 0.5,
            budget: 20,
            seeds: vec![1, 2, 3],
        }
    }
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(CnError::config("meta.population must be >= 2"));
        }
        if self.seeds.is_empty() {
            return Err(CnError::config("meta.seeds must list at least one seed"));
        }
        if self.tournament == 0 || self.tournament > self.population {
            return Err(CnError::config("meta.tournament must lie in 1..=population"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(CnError::config("meta.crossover_rate must lie in [0, 1]"));
        }
        if !(self.mutation_scale >= 0.0) || !self.mutation_scale.is_finite() {
            return Err(CnError::config("meta.mutation_scale must be finite and >= 0"));
        }
        Ok(())
    }
}

/// An inner computing network whose parameters the GA searches.
pub trait MetaTarget: Sync {
    /// Parameters a search box may name.
    fn parameter_names(&self) -> &'static [&'static str];

    /// The parameters the target runs with when nothing is overridden.
    fn defaults(&self) -> ParamGenome;

    /// Final best value of one inner run.
    fn final_best(&self, genome: &ParamGenome, budget: usize, seed: u64) -> Result<f64>;
}

fn override_f64(genome: &ParamGenome, key: &str, slot: &mut f64) {
    if let Some(&v) = genome.get(key) {
        *slot = v;
    }
}

/// Colony parameters searched over one or more TSP instances.
#[derive(Debug, Clone)]
pub struct AcoTarget {
    pub instances: Vec<TspInstance>,
    pub base: AcoParams,
}

impl AcoTarget {
    pub fn params_for(&self, genome: &ParamGenome) -> AcoParams {
        let mut p = self.base;
        override_f64(genome, "alpha", &mut p.alpha);
        override_f64(genome, "beta", &mut p.beta);
        override_f64(genome, "rho", &mut p.rho);
        override_f64(genome, "q", &mut p.q);
        override_f64(genome, "tau0", &mut p.tau0);
        if let Some(&ants) = genome.get("ants") {
            p.ants = ants.round().max(1.0) as usize;
        }
        p
    }
}

impl MetaTarget for AcoTarget {
    fn parameter_names(&self) -> &'static [&'static str] {
        &["alpha", "beta", "rho", "q", "ants", "tau0"]
    }

    fn defaults(&self) -> ParamGenome {
        let p = self.base;
        BTreeMap::from([
            ("alpha".into(), p.alpha),
            ("beta".into(), p.beta),
            ("rho".into(), p.rho),
            ("q".into(), p.q),
            ("ants".into(), p.ants as f64),
            ("tau0".into(), p.tau0),
        ])
    }

    /// Mean over instances of the final best tour length.
    fn final_best(&self, genome: &ParamGenome, budget: usize, seed: u64) -> Result<f64> {
        if self.instances.is_empty() {
            return Err(CnError::config("aco meta target has no instances"));
        }
        let params = self.params_for(genome);
        let mut total = 0.0;
        for inst in &self.instances {
            let mut colony = Colony::new(inst.clone(), params)?;
            let mut rng = RngStream::new(seed);
            let records = run(&mut colony, &ScaleSchedule::new(1, budget), &mut rng)?;
            total += records.last().expect("run yields records").best_value;
        }
        Ok(total / self.instances.len() as f64)
    }
}

/// Swarm coefficients searched on one objective.
#[derive(Debug, Clone)]
pub struct PsoTarget<O> {
    pub objective: O,
    pub bounds: (f64, f64),
    pub base: PsoParams,
}

impl<O> PsoTarget<O> {
    pub fn params_for(&self, genome: &ParamGenome) -> PsoParams {
        let mut p = self.base.clone();
        override_f64(genome, "omega", &mut p.omega);
        override_f64(genome, "c1", &mut p.c1);
        override_f64(genome, "c2", &mut p.c2);
        override_f64(genome, "v_max", &mut p.v_max);
        p
    }
}

impl<O: Objective + Clone + Sync> MetaTarget for PsoTarget<O> {
    fn parameter_names(&self) -> &'static [&'static str] {
        &["omega", "c1", "c2", "v_max"]
    }

    fn defaults(&self) -> ParamGenome {
        BTreeMap::from([
            ("omega".into(), self.base.omega),
            ("c1".into(), self.base.c1),
            ("c2".into(), self.base.c2),
            ("v_max".into(), self.base.v_max),
        ])
    }

    fn final_best(&self, genome: &ParamGenome, budget: usize, seed: u64) -> Result<f64> {
        let mut rng = RngStream::new(seed);
        let mut swarm = Swarm::new(self.objective.clone(), self.params_for(genome), self.bounds, &mut rng)?;
        let records = run(&mut swarm, &ScaleSchedule::new(1, budget), &mut rng)?;
        Ok(records.last().expect("run yields records").best_value)
    }
}

/// Mean final best value over `seeds`. Lower is better.
pub fn evaluate_genome<T: MetaTarget + ?Sized>(
    target: &T,
    genome: &ParamGenome,
    budget: usize,
    seeds: &[u64],
) -> Result<f64> {
    if seeds.is_empty() {
        return Err(CnError::config("at least one evaluation seed is required"));
    }
    let mut sum = 0.0;
    for &s in seeds {
        sum += target.final_best(genome, budget, s)?;
    }
    Ok(sum / seeds.len() as f64)
}

#[derive(Debug, Clone)]
pub struct MetaOutcome {
    pub best: ParamGenome,
    pub fitness: f64,
    /// Best fitness after each generation; entry 0 is the initial population.
    pub trace: Vec<f64>,
    /// One record per generation, carrying the best genome so far.
    pub records: Vec<RunRecord>,
}

fn validate_box<T: MetaTarget + ?Sized>(target: &T, search: &SearchBox) -> Result<()> {
    if search.is_empty() {
        return Err(CnError::config("meta search box is empty"));
    }
    for (key, &(lo, hi)) in search {
        if !target.parameter_names().contains(&key.as_str()) {
            return Err(CnError::config(format!(
                "meta search box names unknown parameter {key:?} (allowed: {:?})",
                target.parameter_names()
            )));
        }
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(CnError::config(format!("meta search box for {key:?} is empty: [{lo}, {hi}]")));
        }
    }
    Ok(())
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn tournament(fitness: &[f64], size: usize, rng: &mut RngStream) -> usize {
    let mut best = rng.below(fitness.len());
    for _ in 1..size {
        let c = rng.below(fitness.len());
        if fitness[c] < fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Generational GA: tournament selection, uniform crossover, Gaussian
/// mutation clipped to the box, and one elite carried over unchanged.
///
/// When the target's defaults lie inside the box, they seed the first
/// individual of the initial population.
pub fn meta_run<T: MetaTarget + ?Sized>(
    config: &MetaConfig,
    target: &T,
    search: &SearchBox,
    master_seed: u64,
) -> Result<MetaOutcome> {
    config.validate()?;
    validate_box(target, search)?;
    let mut rng = RngStream::new(master_seed);
    let started = std::time::Instant::now();

    let defaults = target.defaults();
    let seeded: Option<ParamGenome> = search
        .iter()
        .map(|(k, &(lo, hi))| {
            let v = *defaults.get(k)?;
            (lo..=hi).contains(&v).then(|| (k.clone(), v))
        })
        .collect();

    let mut population: Vec<ParamGenome> = Vec::with_capacity(config.population);
    population.extend(seeded);
    while population.len() < config.population {
        population.push(
            search
                .iter()
                .map(|(k, &(lo, hi))| (k.clone(), if lo == hi { lo } else { rng.uniform_in(lo, hi) }))
                .collect(),
        );
    }

    let evaluate = |pop: &[ParamGenome]| -> Result<Vec<f64>> {
        pop.par_iter()
            .map(|g| evaluate_genome(target, g, config.budget, &config.seeds))
            .collect()
    };

    let mut fitness = evaluate(&population)?;
    let mut trace = Vec::with_capacity(config.generations + 1);
    let mut records = Vec::with_capacity(config.generations + 1);
    let mut record = |generation: usize, pop: &[ParamGenome], fit: &[f64]| {
        let e = argmin(fit);
        trace.push(fit[e]);
        let mean = fit.iter().sum::<f64>() / fit.len() as f64;
        records.push(RunRecord {
            slow_step: generation,
            best_value: fit[e],
            network_output: vec![fit[e], mean],
            parameter_snapshot: pop[e].clone(),
            wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    };
    record(0, &population, &fitness);

    for generation in 1..=config.generations {
        let elite = argmin(&fitness);
        let mut next = Vec::with_capacity(config.population);
        next.push(population[elite].clone());
        while next.len() < config.population {
            let a = &population[tournament(&fitness, config.tournament, &mut rng)];
            let b = &population[tournament(&fitness, config.tournament, &mut rng)];
            let cross = rng.uniform() < config.crossover_rate;
            let child: ParamGenome = search
                .iter()
                .map(|(k, &(lo, hi))| {
                    let mut v = if cross && rng.uniform() < 0.5 { b[k] } else { a[k] };
                    v += rng.normal(0.0, config.mutation_scale * (hi - lo));
                    (k.clone(), v.clamp(lo, hi))
                })
                .collect();
            next.push(child);
        }
        let next_fitness = evaluate(&next)?;
        population = next;
        fitness = next_fitness;
        record(generation, &population, &fitness);
    }

    let e = argmin(&fitness);
    Ok(MetaOutcome {
        best: population[e].clone(),
        fitness: fitness[e],
        trace,
        records,
    })
}
