//! A PSO swarm training an ANN: particle positions are flattened weight
//! vectors and the objective is the batch MSE.

use compnet::ann::{Activation, Dataset, Mlp};
use compnet::network::Updating;
use compnet::pso::{Objective, PsoParams, Swarm};
use compnet::{run, CnError, RngStream, RunRecord, ScaleSchedule};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
pub struct CrossConfig {
    pub layers: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub dataset: Dataset,
    pub pso: PsoParams,
    /// Must equal the ANN parameter count.
    pub dimension: usize,
    pub bounds: (f64, f64),
    pub updating: Updating,
}

/// Batch MSE of a fixed-topology ANN as a function of its parameters.
#[derive(Debug, Clone)]
pub struct AnnObjective {
    template: Mlp,
    dataset: Dataset,
}

impl AnnObjective {
    pub fn new(template: Mlp, dataset: Dataset) -> Self {
        Self { template, dataset }
    }

    pub fn network_with(&self, x: &[f64]) -> compnet::Result<Mlp> {
        let mut mlp = self.template.clone();
        mlp.set_parameters(x)?;
        Ok(mlp)
    }

    pub fn mse(&self, x: &[f64]) -> compnet::Result<f64> {
        self.network_with(x)?.mse(self.dataset.samples())
    }
}

impl Objective for AnnObjective {
    fn dimension(&self) -> usize {
        self.template.parameter_count()
    }

    fn value(&self, x: &[f64]) -> f64 {
        // A failed evaluation surfaces as a divergence on the particle.
        self.mse(x).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct CrossOutcome {
    pub mlp: Mlp,
    pub mse: f64,
    pub records: Vec<RunRecord>,
}

/// Runs the swarm for `schedule` and returns the network at the global best.
pub fn cross_train(cross: &CrossConfig, schedule: &ScaleSchedule, rng: &mut RngStream) -> Result<CrossOutcome> {
    let template = Mlp::zeros(&cross.layers, cross.hidden_activation, cross.output_activation)?;
    let weights = template.parameter_count();
    if cross.dimension != weights {
        return Err(HarnessError::Config(format!(
            "pso dimension {} does not equal the ANN parameter count {weights}",
            cross.dimension
        )));
    }
    if cross.dataset.input_arity() != template.input_arity()
        || cross.dataset.target_arity() != template.output_arity()
    {
        return Err(HarnessError::Config("dataset arities do not match the ANN layers".into()));
    }
    let objective = AnnObjective::new(template, cross.dataset.clone());
    let mut swarm =
        Swarm::new(objective, cross.pso.clone(), cross.bounds, rng)?.with_updating(cross.updating);
    let records = run(&mut swarm, schedule, rng)?;
    let (position, mse) = swarm.global_best();
    let mlp = swarm.objective().network_with(&position)?;
    if !mse.is_finite() {
        return Err(CnError::Divergence {
            node: 0,
            detail: "cross-trained MSE is not finite".into(),
        }
        .into());
    }
    Ok(CrossOutcome { mlp, mse, records })
}
