//! Neural and swarm architectures described as one kind of object: a
//! *computing network*, a set of nodes linked by edges that an adaptation
//! algorithm tunes so the network computes some function.
//!
//! The [`network`] module holds the generic container, [`scale`] the fast/slow
//! scheduler, and each architecture lives in its own module:
//!
//! | module  | nodes           | edges                     | adaptation            | function           |
//! |---------|-----------------|---------------------------|-----------------------|--------------------|
//! | [`ann`] | neurons         | synapses (weight)         | adjust edge weights   | output layer       |
//! | [`aco`] | locations, ants | trails (η, τ)             | adjust pheromone      | shortest tour      |
//! | [`pso`] | particles       | neighbourhoods (best)     | adjust node state     | best position      |
//! | [`eca`] | cells           | neighbourhoods            | none                  | the tape           |
//!
//! [`meta`] adds a third scale by evolving the parameters of the adaptation
//! algorithm, and [`analysis`] measures how much information lives in the
//! interactions rather than in the nodes.
//!
//! ```
//! use compnet::pso::{Benchmark, BenchmarkObjective, PsoParams, Swarm};
//! use compnet::rng::RngStream;
//! use compnet::scale::{run, ScaleSchedule};
//!
//! let mut rng = RngStream::new(7);
//! let sphere = BenchmarkObjective { function: Benchmark::Sphere, dimension: 2 };
//! let mut swarm = Swarm::new(sphere, PsoParams::default(), (-5.12, 5.12), &mut rng).unwrap();
//! let records = run(&mut swarm, &ScaleSchedule::new(1, 100), &mut rng).unwrap();
//! assert!(records.last().unwrap().best_value < 1e-3);
//! ```

pub mod aco;
pub mod analysis;
pub mod ann;
pub mod eca;
pub mod error;
pub mod meta;
pub mod network;
pub mod pso;
pub mod rng;
pub mod scale;

pub use error::{CnError, Result};
pub use network::{ComputingNetwork, Edge, Node, Updating};
pub use rng::RngStream;
pub use scale::{run, Instantiation, RunRecord, ScaleSchedule};
