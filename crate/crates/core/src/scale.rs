//! Dynamical scales and the scheduler that drives them.
//!
//! The fast scale evaluates the network function `f`; the slow scale applies
//! the adaptation algorithm `a` to whatever the fast steps observed. A third,
//! meta scale searches over the parameters of `a` and lives in [`crate::meta`].

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{CnError, Result, StepPosition};
use crate::rng::RngStream;

/// How many fast steps make one slow step, how many slow steps make a run,
/// and how many meta generations wrap the runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSchedule {
    pub fast_steps_per_slow: usize,
    pub slow_steps: usize,
    /// Zero means two-scale operation.
    #[serde(default)]
    pub meta_generations: usize,
}

impl ScaleSchedule {
    pub fn new(fast_steps_per_slow: usize, slow_steps: usize) -> Self {
        Self {
            fast_steps_per_slow,
            slow_steps,
            meta_generations: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fast_steps_per_slow == 0 {
            return Err(CnError::config("fast_steps_per_slow must be at least 1"));
        }
        Ok(())
    }
}

/// Snapshot taken after each round of fast steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub slow_step: usize,
    pub best_value: f64,
    pub network_output: Vec<f64>,
    pub parameter_snapshot: BTreeMap<String, f64>,
    pub wall_clock_ms: f64,
}

/// An architecture expressed as a computing network.
///
/// Implementors own their node and edge state together with the problem they
/// are bound to (dataset, graph, objective or tape), so a run needs nothing
/// beyond the network, a schedule and a random stream.
pub trait Instantiation {
    /// What the fast steps of one slow step hand to the adaptation algorithm.
    type Feedback: Default;

    /// Length of the external input a fast step expects.
    fn input_arity(&self) -> usize;

    /// External input for the `tick`-th fast step of a run.
    fn next_input(&self, _tick: usize) -> Vec<f64> {
        Vec::new()
    }

    /// One evaluation of `f`; returns the readout after the update.
    fn fast_step(&mut self, input: &[f64], rng: &mut RngStream) -> Result<Vec<f64>>;

    /// Adds what the last fast step produced to `feedback`.
    fn observe(&self, tick: usize, input: &[f64], output: &[f64], feedback: &mut Self::Feedback);

    /// One application of the adaptation algorithm `a`.
    fn slow_step(&mut self, feedback: &Self::Feedback, rng: &mut RngStream) -> Result<()>;

    /// The network function `f` of the current state.
    fn readout(&self) -> Vec<f64>;

    /// Scalar summary for the run record (lower is better where it applies).
    fn best_value(&self, feedback: &Self::Feedback) -> f64;

    /// Node and edge counts.
    fn shape(&self) -> (usize, usize);

    /// Parameters and state summaries recorded with every snapshot.
    fn parameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }
}

/// Runs `schedule` on `net`.
///
/// The first record evaluates the unadapted network. Each subsequent record
/// follows one slow step and a fresh round of fast steps, giving
/// `slow_steps + 1` records in total. Meta generations are driven by
/// [`crate::meta::meta_run`]; passing a schedule with `meta_generations > 0`
/// here is a configuration error.
pub fn run<I: Instantiation>(
    net: &mut I,
    schedule: &ScaleSchedule,
    rng: &mut RngStream,
) -> Result<Vec<RunRecord>> {
    schedule.validate()?;
    if schedule.meta_generations > 0 {
        return Err(CnError::config(
            "meta generations are driven by meta::meta_run, not scale::run",
        ));
    }
    let mut records = Vec::with_capacity(schedule.slow_steps + 1);
    let mut tick = 0usize;
    let started = Instant::now();

    let mut feedback = fast_round(net, schedule, 0, &mut tick, rng)?;
    records.push(snapshot(net, 0, &feedback, started));

    for slow in 1..=schedule.slow_steps {
        net.slow_step(&feedback, rng).map_err(|e| CnError::AtStep {
            position: StepPosition {
                slow_step: slow,
                fast_step: None,
            },
            source: Box::new(e),
        })?;
        feedback = fast_round(net, schedule, slow, &mut tick, rng)?;
        records.push(snapshot(net, slow, &feedback, started));
    }
    Ok(records)
}

fn fast_round<I: Instantiation>(
    net: &mut I,
    schedule: &ScaleSchedule,
    slow: usize,
    tick: &mut usize,
    rng: &mut RngStream,
) -> Result<I::Feedback> {
    let mut feedback = I::Feedback::default();
    for fast in 0..schedule.fast_steps_per_slow {
        let at = |e: CnError| CnError::AtStep {
            position: StepPosition {
                slow_step: slow,
                fast_step: Some(fast),
            },
            source: Box::new(e),
        };
        let input = net.next_input(*tick);
        if input.len() != net.input_arity() {
            return Err(at(CnError::config(format!(
                "input arity {} does not match declared arity {}",
                input.len(),
                net.input_arity()
            ))));
        }
        let output = net.fast_step(&input, rng).map_err(at)?;
        net.observe(*tick, &input, &output, &mut feedback);
        *tick += 1;
    }
    Ok(feedback)
}

fn snapshot<I: Instantiation>(
    net: &I,
    slow_step: usize,
    feedback: &I::Feedback,
    started: Instant,
) -> RunRecord {
    RunRecord {
        slow_step,
        best_value: net.best_value(feedback),
        network_output: net.readout(),
        parameter_snapshot: net.parameters(),
        wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}
