//! Particle swarm optimisation as a computing network.
//!
//! Particles are nodes holding position, velocity and personal best.
//! Neighbourhoods are hyperedges whose payload is the best personal best among
//! their members. Unlike the ANN and ACO instantiations, the adaptation
//! algorithm here rewrites node state: each slow step moves the particles.
//!
//! Everything is minimisation. A pairwise neighbourhood best is "the better of
//! the two personal bests", i.e. the one with the lower objective value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CnError, Result};
use crate::network::{ComputingNetwork, Updating};
use crate::rng::RngStream;
use crate::scale::Instantiation;

/// A function to minimise.
pub trait Objective {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
}

/// Standard test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Benchmark {
    Sphere,
    Rosenbrock,
    Rastrigin,
}

impl Benchmark {
    pub fn evaluate(self, x: &[f64]) -> f64 {
        match self {
            Benchmark::Sphere => x.iter().map(|v| v * v).sum(),
            Benchmark::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            Benchmark::Rastrigin => {
                10.0 * x.len() as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                        .sum::<f64>()
            }
        }
    }

    /// Conventional initialisation box.
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            Benchmark::Sphere | Benchmark::Rastrigin => (-5.12, 5.12),
            Benchmark::Rosenbrock => (-2.048, 2.048),
        }
    }
}

/// A benchmark bound to a dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkObjective {
    pub function: Benchmark,
    pub dimension: usize,
}

impl Objective for BenchmarkObjective {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.function.evaluate(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// Particle `i` listens to `i-1`, `i`, `i+1`.
    Ring,
    /// One neighbourhood containing every particle.
    Global,
    /// Explicit neighbourhoods; every member listens to the whole set.
    Custom(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoParams {
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    /// Velocity clamp per dimension; 0 disables clamping.
    pub v_max: f64,
    pub particles: usize,
    pub topology: Topology,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            omega: 0.72,
            c1: 1.49,
            c2: 1.49,
            v_max: 0.0,
            particles: 30,
            topology: Topology::Ring,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega", self.omega), ("c1", self.c1), ("c2", self.c2), ("v_max", self.v_max)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CnError::config(format!("pso.{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.particles == 0 {
            return Err(CnError::config("pso.particles must be >= 1"));
        }
        if let Topology::Custom(sets) = &self.topology {
            for set in sets {
                if set.is_empty() {
                    return Err(CnError::config("pso.topology: empty neighbourhood"));
                }
                if let Some(bad) = set.iter().find(|&&p| p >= self.particles) {
                    return Err(CnError::config(format!(
                        "pso.topology: particle {bad} does not exist"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticlePayload {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Objective at the current position.
    pub value: f64,
}

impl ParticlePayload {
    /// A particle that has not been evaluated yet.
    pub fn new(position: Vec<f64>, velocity: Vec<f64>) -> Self {
        Self {
            best_position: position.clone(),
            position,
            velocity,
            best_value: f64::INFINITY,
            value: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodPayload {
    /// Particle whose personal best is the neighbourhood best.
    pub leader: usize,
    pub best_position: Vec<f64>,
    pub best_value: f64,
}

/// Best personal best among `members`; ties go to the lowest particle index.
pub fn neighborhood_best(particles: &[&ParticlePayload], members: &[usize]) -> NeighborhoodPayload {
    let mut leader = members[0];
    for &m in members {
        let (cand, cur) = (particles[m].best_value, particles[leader].best_value);
        if cand < cur || (cand == cur && m < leader) {
            leader = m;
        }
    }
    NeighborhoodPayload {
        leader,
        best_position: particles[leader].best_position.clone(),
        best_value: particles[leader].best_value,
    }
}

/// Inertia-weight update of one particle towards `guide`.
///
/// `draw` supplies `r1` then `r2` for each dimension in turn.
pub fn move_particle(
    particle: &mut ParticlePayload,
    guide: &[f64],
    params: &PsoParams,
    mut draw: impl FnMut() -> f64,
) {
    for d in 0..particle.position.len() {
        let r1 = draw();
        let r2 = draw();
        let x = particle.position[d];
        let mut v = params.omega * particle.velocity[d]
            + params.c1 * r1 * (particle.best_position[d] - x)
            + params.c2 * r2 * (guide[d] - x);
        if params.v_max > 0.0 {
            v = v.clamp(-params.v_max, params.v_max);
        }
        particle.velocity[d] = v;
        particle.position[d] = x + v;
    }
}

/// A swarm bound to an objective.
#[derive(Debug, Clone)]
pub struct Swarm<O> {
    objective: O,
    params: PsoParams,
    bounds: (f64, f64),
    net: ComputingNetwork<ParticlePayload, NeighborhoodPayload>,
    last_values: Vec<f64>,
}

impl<O: Objective> Swarm<O> {
    /// Positions uniform in `bounds`, velocities uniform in ±(hi-lo)/10.
    pub fn new(objective: O, params: PsoParams, bounds: (f64, f64), rng: &mut RngStream) -> Result<Self> {
        params.validate()?;
        let dim = objective.dimension();
        if dim == 0 {
            return Err(CnError::config("objective dimension must be >= 1"));
        }
        let (lo, hi) = bounds;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(CnError::config(format!("bounds [{lo}, {hi}] are empty or non-finite")));
        }
        let vspan = (hi - lo) / 10.0;
        let particles: Vec<ParticlePayload> = (0..params.particles)
            .map(|_| {
                let x: Vec<f64> = (0..dim).map(|_| rng.uniform_in(lo, hi)).collect();
                let v: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-vspan, vspan)).collect();
                ParticlePayload::new(x, v)
            })
            .collect();
        Self::from_particles(objective, params, bounds, particles)
    }

    /// A swarm with explicit particle states.
    pub fn from_particles(
        objective: O,
        params: PsoParams,
        bounds: (f64, f64),
        particles: Vec<ParticlePayload>,
    ) -> Result<Self> {
        let mut params = params;
        params.particles = particles.len();
        params.validate()?;
        let dim = objective.dimension();
        if let Some(i) = particles
            .iter()
            .position(|p| p.position.len() != dim || p.velocity.len() != dim || p.best_position.len() != dim)
        {
            return Err(CnError::config(format!("particle {i} does not have dimension {dim}")));
        }
        let n = particles.len();
        let placeholder = |leader: usize| NeighborhoodPayload {
            leader,
            best_position: vec![0.0; dim],
            best_value: f64::INFINITY,
        };
        let mut net = ComputingNetwork::new(particles).with_hyperedges();
        match &params.topology {
            Topology::Ring => {
                for i in 0..n {
                    let mut members = vec![i];
                    for j in [(i + n - 1) % n, (i + 1) % n] {
                        if !members.contains(&j) {
                            members.push(j);
                        }
                    }
                    // The first endpoint is the particle that listens.
                    if members.len() == 1 {
                        members.push(i);
                    }
                    net.connect(members, true, placeholder(i))?;
                }
            }
            Topology::Global => {
                let mut members: Vec<usize> = (0..n).collect();
                if n == 1 {
                    members.push(0);
                }
                net.connect(members, false, placeholder(0))?;
            }
            Topology::Custom(sets) => {
                for set in sets {
                    let mut members = set.clone();
                    if members.len() == 1 {
                        members.push(members[0]);
                    }
                    net.connect(members, false, placeholder(set[0]))?;
                }
            }
        }
        let mut swarm = Self {
            objective,
            params,
            bounds,
            net,
            last_values: Vec::new(),
        };
        swarm.refresh_neighborhoods();
        Ok(swarm)
    }

    pub fn with_updating(mut self, updating: Updating) -> Self {
        self.net = self.net.with_updating(updating);
        self
    }

    pub fn params(&self) -> &PsoParams {
        &self.params
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }

    pub fn network(&self) -> &ComputingNetwork<ParticlePayload, NeighborhoodPayload> {
        &self.net
    }

    pub fn particle(&self, i: usize) -> &ParticlePayload {
        self.net.node(i)
    }

    pub fn particles(&self) -> impl Iterator<Item = &ParticlePayload> {
        self.net.nodes().iter().map(|n| &n.payload)
    }

    /// Objective values from the last evaluation, in particle order.
    pub fn last_values(&self) -> &[f64] {
        &self.last_values
    }

    fn evaluate_one(&mut self, i: usize) -> Result<f64> {
        let y = self.objective.value(&self.net.node(i).position);
        if !y.is_finite() {
            return Err(CnError::diverged(i, format!("objective value {y}")));
        }
        let p = self.net.node_mut(i);
        p.value = y;
        if y < p.best_value {
            p.best_value = y;
            p.best_position = p.position.clone();
        }
        Ok(y)
    }

    /// Evaluates every particle in index order and refreshes neighbourhoods.
    pub fn evaluate(&mut self) -> Result<Vec<f64>> {
        let values = (0..self.net.node_count())
            .map(|i| self.evaluate_one(i))
            .collect::<Result<Vec<f64>>>()?;
        self.refresh_neighborhoods();
        self.last_values = values.clone();
        Ok(values)
    }

    fn refresh_edge(&mut self, e: usize) {
        let refs: Vec<&ParticlePayload> = self.net.nodes().iter().map(|n| &n.payload).collect();
        let best = neighborhood_best(&refs, &self.net.edge(e).endpoints);
        *self.net.edge_payload_mut(e) = best;
    }

    pub fn refresh_neighborhoods(&mut self) {
        for e in 0..self.net.edge_count() {
            self.refresh_edge(e);
        }
    }

    /// Best neighbourhood payload among edges particle `i` listens to.
    ///
    /// A directed edge is heard by its first endpoint only; an undirected one
    /// by all members. Particles with no neighbourhood follow their own best.
    pub fn guide(&self, i: usize) -> (Vec<f64>, f64) {
        let mut best: Option<&NeighborhoodPayload> = None;
        for &e in self.net.incident(i) {
            let edge = self.net.edge(e);
            if edge.directed && edge.endpoints[0] != i {
                continue;
            }
            let cand = &edge.payload;
            let better = match best {
                None => true,
                Some(b) => {
                    cand.best_value < b.best_value
                        || (cand.best_value == b.best_value && cand.leader < b.leader)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        match best {
            Some(b) => (b.best_position.clone(), b.best_value),
            None => {
                let p = self.net.node(i);
                (p.best_position.clone(), p.best_value)
            }
        }
    }

    /// Moves every particle once.
    ///
    /// Each particle draws `r1, r2` from its own sub-stream, so results do not
    /// depend on visiting order. In the asynchronous modes a particle is
    /// re-evaluated right after it moves and the neighbourhoods it belongs to
    /// are refreshed before the next particle moves.
    pub fn move_swarm(&mut self, rng: &mut RngStream) -> Result<()> {
        let streams = rng.split();
        let order = self.net.update_order(rng);
        let asynchronous = self.net.updating() != Updating::Synchronous;
        let guides: Vec<Vec<f64>> = if asynchronous {
            Vec::new()
        } else {
            (0..self.net.node_count()).map(|i| self.guide(i).0).collect()
        };
        for i in order {
            let guide = if asynchronous { self.guide(i).0 } else { guides[i].clone() };
            let mut stream = streams.stream(i);
            let params = self.params.clone();
            move_particle(self.net.node_mut(i), &guide, &params, || stream.uniform());
            if let Some(d) = self.net.node(i).position.iter().position(|v| !v.is_finite()) {
                return Err(CnError::diverged(i, format!("position component {d} is non-finite")));
            }
            if asynchronous {
                self.evaluate_one(i)?;
                let edges = self.net.incident(i).to_vec();
                for e in edges {
                    self.refresh_edge(e);
                }
            }
        }
        Ok(())
    }

    /// Minimum over all personal bests; ties go to the lowest index.
    pub fn global_best(&self) -> (Vec<f64>, f64) {
        let mut best = 0;
        for (i, p) in self.particles().enumerate() {
            if p.best_value < self.particle(best).best_value {
                best = i;
            }
        }
        let p = self.particle(best);
        (p.best_position.clone(), p.best_value)
    }
}

impl<O: Objective> Instantiation for Swarm<O> {
    type Feedback = Vec<f64>;

    fn input_arity(&self) -> usize {
        0
    }

    fn fast_step(&mut self, _input: &[f64], _rng: &mut RngStream) -> Result<Vec<f64>> {
        self.evaluate()?;
        Ok(self.readout())
    }

    fn observe(&self, _tick: usize, _input: &[f64], _output: &[f64], fb: &mut Vec<f64>) {
        fb.clear();
        fb.extend_from_slice(&self.last_values);
    }

    fn slow_step(&mut self, feedback: &Vec<f64>, rng: &mut RngStream) -> Result<()> {
        if feedback.len() != self.net.node_count() {
            return Err(CnError::config(format!(
                "feedback has {} values for {} particles",
                feedback.len(),
                self.net.node_count()
            )));
        }
        self.move_swarm(rng)
    }

    /// Global best value followed by its position.
    fn readout(&self) -> Vec<f64> {
        let (x, v) = self.global_best();
        std::iter::once(v).chain(x).collect()
    }

    fn best_value(&self, _fb: &Vec<f64>) -> f64 {
        self.global_best().1
    }

    fn shape(&self) -> (usize, usize) {
        (self.net.node_count(), self.net.edge_count())
    }

    fn parameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("omega".to_string(), self.params.omega),
            ("c1".to_string(), self.params.c1),
            ("c2".to_string(), self.params.c2),
            ("v_max".to_string(), self.params.v_max),
            ("particles".to_string(), self.params.particles as f64),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(dim: usize) -> BenchmarkObjective {
        BenchmarkObjective {
            function: Benchmark::Sphere,
            dimension: dim,
        }
    }

    fn params_with(omega: f64, c1: f64, c2: f64) -> PsoParams {
        PsoParams {
            omega,
            c1,
            c2,
            ..Default::default()
        }
    }

    #[test]
    fn benchmark_values() {
        assert_eq!(Benchmark::Sphere.evaluate(&[1.0, 2.0]), 5.0);
        assert_eq!(Benchmark::Rosenbrock.evaluate(&[1.0, 1.0, 1.0]), 0.0);
        assert!(Benchmark::Rastrigin.evaluate(&[0.0, 0.0]).abs() < 1e-12);
    }

    #[test]
    fn evaluate_updates_personal_best() {
        let p = ParticlePayload::new(vec![0.0, 0.0], vec![0.0, 0.0]);
        let mut s = Swarm::from_particles(sphere(2), PsoParams::default(), (-1.0, 1.0), vec![p]).unwrap();
        s.evaluate().unwrap();
        assert_eq!(s.particle(0).value, 0.0);
        assert_eq!(s.particle(0).best_value, 0.0);
    }

    #[test]
    fn evaluate_keeps_better_personal_best() {
        let mut p = ParticlePayload::new(vec![1.0, 2.0], vec![0.0, 0.0]);
        p.best_position = vec![0.1, 0.0];
        p.best_value = 0.01;
        let mut s = Swarm::from_particles(sphere(2), PsoParams::default(), (-1.0, 1.0), vec![p]).unwrap();
        assert_eq!(s.evaluate().unwrap(), vec![5.0]);
        assert_eq!(s.particle(0).best_value, 0.01);
        assert_eq!(s.particle(0).best_position, vec![0.1, 0.0]);
    }

    struct Exploding;
    impl Objective for Exploding {
        fn dimension(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            if x[0] > 0.0 { f64::NAN } else { 0.0 }
        }
    }

    #[test]
    fn non_finite_objective_names_particle() {
        let ps = vec![
            ParticlePayload::new(vec![-1.0], vec![0.0]),
            ParticlePayload::new(vec![1.0], vec![0.0]),
        ];
        let mut s = Swarm::from_particles(Exploding, PsoParams::default(), (-1.0, 1.0), ps).unwrap();
        assert!(matches!(s.evaluate(), Err(CnError::Divergence { node: 1, .. })));
    }

    fn with_bests(values: &[f64]) -> Vec<ParticlePayload> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut p = ParticlePayload::new(vec![i as f64], vec![0.0]);
                p.best_value = v;
                p
            })
            .collect()
    }

    #[test]
    fn neighborhood_best_examples() {
        let ps = with_bests(&[3.0, 1.0]);
        let refs: Vec<&ParticlePayload> = ps.iter().collect();
        assert_eq!(neighborhood_best(&refs, &[0, 1]).best_value, 1.0);

        let ps = with_bests(&[4.0, 4.0, 4.0]);
        let refs: Vec<&ParticlePayload> = ps.iter().collect();
        assert_eq!(neighborhood_best(&refs, &[2, 1, 0]).leader, 0);

        let ps = with_bests(&[5.0, 2.0, 9.0]);
        let refs: Vec<&ParticlePayload> = ps.iter().collect();
        let nb = neighborhood_best(&refs, &[0, 1, 2]);
        assert_eq!((nb.leader, nb.best_value), (1, 2.0));
    }

    #[test]
    fn pure_inertial_drift() {
        let mut p = ParticlePayload::new(vec![1.0, -2.0], vec![0.5, 0.25]);
        p.best_position = vec![9.0, 9.0];
        move_particle(&mut p, &[-9.0, -9.0], &params_with(1.0, 0.0, 0.0), || 0.7);
        assert_eq!(p.velocity, vec![0.5, 0.25]);
        assert_eq!(p.position, vec![1.5, -1.75]);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let mut p = ParticlePayload::new(vec![0.3], vec![0.0]);
        move_particle(&mut p, &[0.3], &PsoParams::default(), || 0.9);
        assert_eq!(p.position, vec![0.3]);
        assert_eq!(p.velocity, vec![0.0]);
    }

    #[test]
    fn social_pull_with_forced_draw() {
        let mut p = ParticlePayload::new(vec![0.0], vec![0.0]);
        move_particle(&mut p, &[2.0], &params_with(0.0, 0.0, 1.0), || 1.0);
        assert_eq!(p.velocity, vec![2.0]);
        assert_eq!(p.position, vec![2.0]);
    }

    #[test]
    fn velocity_clamp() {
        let mut p = ParticlePayload::new(vec![0.0], vec![10.0]);
        let params = PsoParams {
            v_max: 1.5,
            ..params_with(1.0, 0.0, 0.0)
        };
        move_particle(&mut p, &[0.0], &params, || 0.5);
        assert_eq!(p.velocity, vec![1.5]);
    }

    #[test]
    fn swarm_level_zero_attraction_drift() {
        let mut rng = RngStream::new(3);
        let mut s = Swarm::new(sphere(3), params_with(1.0, 0.0, 0.0), (-1.0, 1.0), &mut rng).unwrap();
        s.evaluate().unwrap();
        let before: Vec<ParticlePayload> = s.particles().cloned().collect();
        s.move_swarm(&mut rng).unwrap();
        for (b, a) in before.iter().zip(s.particles()) {
            assert_eq!(a.velocity, b.velocity);
            for d in 0..3 {
                assert_eq!(a.position[d], b.position[d] + b.velocity[d]);
            }
        }
    }

    #[test]
    fn ring_topology_structure() {
        let mut rng = RngStream::new(0);
        let s = Swarm::new(sphere(2), PsoParams { particles: 5, ..Default::default() }, (-1.0, 1.0), &mut rng).unwrap();
        assert_eq!(s.network().edge_count(), 5);
        assert_eq!(s.network().edge(0).endpoints, vec![0, 4, 1]);
        assert!(s.network().edges().iter().all(|e| e.is_hyperedge() && e.directed));
    }

    #[test]
    fn global_topology_guide_is_global_best() {
        let mut rng = RngStream::new(1);
        let params = PsoParams {
            topology: Topology::Global,
            ..Default::default()
        };
        let mut s = Swarm::new(sphere(2), params, (-3.0, 3.0), &mut rng).unwrap();
        for _ in 0..5 {
            s.evaluate().unwrap();
            let g = s.global_best().1;
            assert_eq!(s.network().edge(0).payload.best_value, g);
            for i in 0..30 {
                assert_eq!(s.guide(i).1, g);
            }
            s.move_swarm(&mut rng).unwrap();
        }
    }

    #[test]
    fn custom_topology_validated() {
        let bad = PsoParams {
            particles: 3,
            topology: Topology::Custom(vec![vec![0, 5]]),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let lonely = PsoParams {
            particles: 3,
            topology: Topology::Custom(vec![vec![0, 1]]),
            ..Default::default()
        };
        let mut rng = RngStream::new(2);
        let mut s = Swarm::new(sphere(1), lonely, (-1.0, 1.0), &mut rng).unwrap();
        s.evaluate().unwrap();
        // Particle 2 belongs to no neighbourhood and follows itself.
        assert_eq!(s.guide(2).1, s.particle(2).best_value);
    }

    #[test]
    fn invalid_construction() {
        let mut rng = RngStream::new(0);
        assert!(Swarm::new(sphere(0), PsoParams::default(), (-1.0, 1.0), &mut rng).is_err());
        assert!(Swarm::new(sphere(2), PsoParams::default(), (1.0, 1.0), &mut rng).is_err());
        assert!(Swarm::new(sphere(2), params_with(-0.1, 1.0, 1.0), (-1.0, 1.0), &mut rng).is_err());
    }

    #[test]
    fn feedback_shape_checked() {
        let mut rng = RngStream::new(0);
        let mut s = Swarm::new(sphere(2), PsoParams::default(), (-1.0, 1.0), &mut rng).unwrap();
        assert!(matches!(s.slow_step(&vec![1.0], &mut rng), Err(CnError::Config(_))));
    }

    #[test]
    fn async_modes_keep_invariants() {
        for mode in [Updating::AsynchronousFixedOrder, Updating::AsynchronousRandomOrder] {
            let mut rng = RngStream::new(4);
            let mut s = Swarm::new(sphere(2), PsoParams::default(), (-5.0, 5.0), &mut rng)
                .unwrap()
                .with_updating(mode);
            let mut prev = f64::INFINITY;
            for _ in 0..50 {
                s.evaluate().unwrap();
                let g = s.global_best().1;
                assert!(g <= prev);
                prev = g;
                s.move_swarm(&mut rng).unwrap();
            }
            assert!(prev < 1e-2);
        }
    }
}
