//! Ant colony optimisation as a computing network.
//!
//! Nodes are locations holding resident ants; undirected edges are trails
//! carrying a heuristic value `η = 1/d` and a pheromone level `τ`. The fast
//! scale is tour construction, the slow scale evaporates and deposits
//! pheromone, and an optional 2-opt local search (the "demon") sits between
//! them. The network function is the shortest tour found so far.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CnError, Result};
use crate::network::ComputingNetwork;
use crate::rng::RngStream;
use crate::scale::Instantiation;

/// Restarts allowed per ant per iteration before a dead end becomes an error.
pub const MAX_RESTARTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Demon {
    #[default]
    Off,
    TwoOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcoParams {
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent.
    pub beta: f64,
    /// Evaporation rate.
    pub rho: f64,
    /// Deposit constant.
    pub q: f64,
    /// Ants per iteration.
    pub ants: usize,
    pub tau0: f64,
    pub tau_min: f64,
    pub demon: Demon,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            rho: 0.1,
            q: 1.0,
            ants: 10,
            tau0: 1.0,
            tau_min: 1e-9,
            demon: Demon::Off,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(CnError::config(format!("aco.{field} {why}")));
        if !(self.alpha >= 0.0) {
            return bad("alpha", "must be >= 0");
        }
        if !(self.beta >= 0.0) {
            return bad("beta", "must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad("rho", "must lie in [0, 1]");
        }
        if !(self.q > 0.0) {
            return bad("q", "must be > 0");
        }
        if self.ants == 0 {
            return bad("ants", "must be >= 1");
        }
        if !(self.tau0 > 0.0) {
            return bad("tau0", "must be > 0");
        }
        if !(self.tau_min >= 0.0) || self.tau_min > self.tau0 {
            return bad("tau_min", "must lie in [0, tau0]");
        }
        Ok(())
    }
}

/// A symmetric travelling-salesman instance. Missing edges have infinite cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    costs: Vec<Vec<f64>>,
}

impl TspInstance {
    pub fn from_matrix(costs: Vec<Vec<f64>>) -> Result<Self> {
        let n = costs.len();
        if n < 3 {
            return Err(CnError::MalformedInstance(format!("need at least 3 cities, got {n}")));
        }
        for (i, row) in costs.iter().enumerate() {
            if row.len() != n {
                return Err(CnError::MalformedInstance(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                if d.is_nan() || d <= 0.0 {
                    return Err(CnError::MalformedInstance(format!(
                        "cost ({i},{j}) = {d} must be positive"
                    )));
                }
                if d != costs[j][i] {
                    return Err(CnError::MalformedInstance(format!(
                        "cost matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { costs })
    }

    /// Euclidean distances between planar points.
    pub fn from_coordinates(points: &[(f64, f64)]) -> Result<Self> {
        let costs = points
            .iter()
            .map(|&(xi, yi)| {
                points
                    .iter()
                    .map(|&(xj, yj)| ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt())
                    .collect()
            })
            .collect();
        Self::from_matrix(costs)
    }

    /// `n` cities placed uniformly in the unit square.
    pub fn random_euclidean(n: usize, rng: &mut RngStream) -> Result<Self> {
        let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.uniform(), rng.uniform())).collect();
        Self::from_coordinates(&points)
    }

    /// CSV of `id,x,y` rows (header optional).
    pub fn from_coordinate_csv<R: Read>(reader: R) -> Result<Self> {
        let mut points = Vec::new();
        for (row, rec) in csv_rows(reader)?.into_iter().enumerate() {
            if row == 0 && rec.first().is_some_and(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            if rec.len() != 3 {
                return Err(CnError::config(format!("coordinate row {} needs id,x,y", row + 1)));
            }
            let x = parse_cost(&rec[1], row)?;
            let y = parse_cost(&rec[2], row)?;
            points.push((x, y));
        }
        Self::from_coordinates(&points)
    }

    /// CSV full cost matrix, no header. `inf` or an empty cell marks a missing
    /// edge; the diagonal is ignored.
    pub fn from_matrix_csv<R: Read>(reader: R) -> Result<Self> {
        let costs = csv_rows(reader)?
            .into_iter()
            .enumerate()
            .map(|(row, rec)| {
                rec.iter()
                    .map(|v| if v.is_empty() { Ok(f64::INFINITY) } else { parse_cost(v, row) })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_matrix(costs)
    }

    pub fn from_path(path: impl AsRef<Path>, format: GraphFormat) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        match format {
            GraphFormat::Coordinates => Self::from_coordinate_csv(file),
            GraphFormat::Matrix => Self::from_matrix_csv(file),
        }
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.costs[i][j]
    }

    /// Closed-tour length, including the edge back to the start.
    pub fn tour_length(&self, tour: &[usize]) -> f64 {
        if tour.is_empty() {
            return 0.0;
        }
        tour.iter()
            .zip(tour.iter().cycle().skip(1))
            .map(|(&a, &b)| self.cost(a, b))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    Coordinates,
    Matrix,
}

fn csv_rows<R: Read>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    rdr.records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| CnError::config(format!("graph csv: {e}")))
        })
        .collect()
}

fn parse_cost(v: &str, row: usize) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| CnError::config(format!("graph row {}: bad number {v:?}", row + 1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntState {
    pub id: usize,
    /// Partial path `s_k^p`.
    pub path: Vec<usize>,
    /// Sum of edge costs along `path` (without the closing edge).
    pub length: f64,
    pub visited: Vec<bool>,
}

impl AntState {
    pub fn new(id: usize, start: usize, cities: usize) -> Self {
        let mut visited = vec![false; cities];
        visited[start] = true;
        Self {
            id,
            path: vec![start],
            length: 0.0,
            visited,
        }
    }

    pub fn position(&self) -> usize {
        *self.path.last().expect("ants always have a start")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocationPayload {
    pub resident: Vec<AntState>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrailPayload {
    pub cost: f64,
    /// Heuristic value `η = 1/cost`.
    pub heuristic: f64,
    /// Pheromone level `τ`.
    pub pheromone: f64,
}

/// A complete closed tour.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub path: Vec<usize>,
    pub length: f64,
}

/// A candidate move: target node and the trail leading to it.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub node: usize,
    pub trail: &'a TrailPayload,
}

/// Selection probabilities `τ^α η^β / Σ τ^α η^β` over `candidates`.
///
/// Falls back to uniform when every weight is zero.
pub fn transition_probabilities(candidates: &[Candidate<'_>], params: &AcoParams) -> Vec<f64> {
    let weights: Vec<f64> = candidates
        .iter()
        .map(|c| c.trail.pheromone.powf(params.alpha) * c.trail.heuristic.powf(params.beta))
        .collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / candidates.len() as f64; candidates.len()]
    }
}

/// Samples the ant's next node from `candidates`.
pub fn choose_next(
    ant: &AntState,
    candidates: &[Candidate<'_>],
    params: &AcoParams,
    rng: &mut RngStream,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(CnError::DeadEnd {
            ant: ant.id,
            node: ant.position(),
            restarts: 0,
        });
    }
    let probs = transition_probabilities(candidates, params);
    let r = rng.uniform();
    let mut acc = 0.0;
    for (c, p) in candidates.iter().zip(&probs) {
        acc += p;
        if r < acc {
            return Ok(c.node);
        }
    }
    Ok(candidates.last().unwrap().node)
}

/// Repeated 2-opt until no reversal shortens the tour.
pub fn demon_local_search(instance: &TspInstance, tour: &Tour) -> Tour {
    let mut path = tour.path.clone();
    let n = path.len();
    if n < 4 {
        return Tour {
            length: instance.tour_length(&path),
            path,
        };
    }
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (path[i], path[i + 1]);
                let (c, d) = (path[j], path[(j + 1) % n]);
                let delta = instance.cost(a, c) + instance.cost(b, d)
                    - instance.cost(a, b)
                    - instance.cost(c, d);
                if delta < -1e-12 {
                    path[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
    }
    Tour {
        length: instance.tour_length(&path),
        path,
    }
}

/// A colony of ants on a TSP graph.
#[derive(Debug, Clone)]
pub struct Colony {
    instance: TspInstance,
    params: AcoParams,
    net: ComputingNetwork<LocationPayload, TrailPayload>,
    /// `trail[i][j]` is the edge id between `i` and `j`, if any.
    trail: Vec<Vec<Option<usize>>>,
    best: Option<Tour>,
    last_iteration: Vec<Tour>,
}

impl Colony {
    pub fn new(instance: TspInstance, params: AcoParams) -> Result<Self> {
        params.validate()?;
        let n = instance.len();
        let mut net = ComputingNetwork::new((0..n).map(|_| LocationPayload::default()));
        let mut trail = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let cost = instance.cost(i, j);
                if !cost.is_finite() {
                    continue;
                }
                let id = net.connect(
                    vec![i, j],
                    false,
                    TrailPayload {
                        cost,
                        heuristic: 1.0 / cost,
                        pheromone: params.tau0,
                    },
                )?;
                trail[i][j] = Some(id);
                trail[j][i] = Some(id);
            }
        }
        Ok(Self {
            instance,
            params,
            net,
            trail,
            best: None,
            last_iteration: Vec::new(),
        })
    }

    pub fn params(&self) -> &AcoParams {
        &self.params
    }

    pub fn instance(&self) -> &TspInstance {
        &self.instance
    }

    pub fn network(&self) -> &ComputingNetwork<LocationPayload, TrailPayload> {
        &self.net
    }

    pub fn trail_between(&self, i: usize, j: usize) -> Option<&TrailPayload> {
        self.trail[i][j].map(|e| &self.net.edge(e).payload)
    }

    pub fn pheromone(&self, i: usize, j: usize) -> Option<f64> {
        self.trail_between(i, j).map(|t| t.pheromone)
    }

    /// Pheromone levels in edge order.
    pub fn pheromones(&self) -> Vec<f64> {
        self.net.edges().iter().map(|e| e.payload.pheromone).collect()
    }

    pub fn set_all_pheromone(&mut self, tau: f64) {
        self.net.edge_payloads_mut().for_each(|t| t.pheromone = tau);
    }

    /// Tours constructed by the most recent fast step.
    pub fn last_iteration(&self) -> &[Tour] {
        &self.last_iteration
    }

    /// The shortest complete tour found so far.
    pub fn best_path(&self) -> Option<&Tour> {
        self.best.as_ref()
    }

    fn candidates(&self, ant: &AntState) -> Vec<Candidate<'_>> {
        let here = ant.position();
        (0..self.instance.len())
            .filter(|&j| !ant.visited[j])
            .filter_map(|j| {
                self.trail[here][j].map(|e| Candidate {
                    node: j,
                    trail: &self.net.edge(e).payload,
                })
            })
            .collect()
    }

    fn relocate(&mut self, ant: AntState, to: usize) {
        self.net.node_mut(to).resident.push(ant);
    }

    fn take_ant(&mut self, at: usize, id: usize) -> AntState {
        let resident = &mut self.net.node_mut(at).resident;
        let k = resident.iter().position(|a| a.id == id).expect("ant is resident");
        resident.remove(k)
    }

    /// Walks one ant to a complete closed tour, restarting on dead ends.
    fn walk(&mut self, id: usize, rng: &mut RngStream) -> Result<Tour> {
        let n = self.instance.len();
        let mut restarts = 0;
        'restart: loop {
            let start = rng.below(n);
            self.relocate(AntState::new(id, start, n), start);
            let mut at = start;
            loop {
                let ant = self.take_ant(at, id);
                if ant.path.len() == n {
                    match self.trail[at][start] {
                        Some(e) => {
                            let length = ant.length + self.net.edge(e).payload.cost;
                            let path = ant.path.clone();
                            self.relocate(ant, start);
                            return Ok(Tour { path, length });
                        }
                        None => {
                            restarts += 1;
                            if restarts > MAX_RESTARTS {
                                return Err(CnError::DeadEnd { ant: id, node: at, restarts: restarts - 1 });
                            }
                            continue 'restart;
                        }
                    }
                }
                let candidates = self.candidates(&ant);
                let next = match choose_next(&ant, &candidates, &self.params, rng) {
                    Ok(next) => next,
                    Err(_) => {
                        restarts += 1;
                        if restarts > MAX_RESTARTS {
                            return Err(CnError::DeadEnd { ant: id, node: at, restarts: restarts - 1 });
                        }
                        continue 'restart;
                    }
                };
                let cost = self.instance.cost(at, next);
                let mut ant = ant;
                ant.path.push(next);
                ant.length += cost;
                ant.visited[next] = true;
                self.relocate(ant, next);
                at = next;
            }
        }
    }

    /// Sends `ants` ants through the network, one after another.
    pub fn construct_solutions(&mut self, rng: &mut RngStream) -> Result<Vec<Tour>> {
        self.net.node_payloads_mut().for_each(|l| l.resident.clear());
        let mut tours = Vec::with_capacity(self.params.ants);
        for id in 0..self.params.ants {
            tours.push(self.walk(id, rng)?);
        }
        for t in &tours {
            self.offer(t);
        }
        Ok(tours)
    }

    fn offer(&mut self, tour: &Tour) {
        if self.best.as_ref().is_none_or(|b| tour.length < b.length) {
            self.best = Some(tour.clone());
        }
    }

    /// `τ ← max(τ_min, (1-ρ)τ)` on every trail.
    pub fn evaporate(&mut self, rho: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(CnError::config(format!("evaporation rate {rho} outside [0, 1]")));
        }
        let floor = self.params.tau_min;
        self.net
            .edge_payloads_mut()
            .for_each(|t| t.pheromone = floor.max((1.0 - rho) * t.pheromone));
        Ok(())
    }

    /// Adds `q/L` to every trail of every tour of length `L`.
    pub fn deposit(&mut self, tours: &[Tour], q: f64) -> Result<()> {
        for tour in tours {
            if !(tour.length > 0.0) || !tour.length.is_finite() {
                return Err(CnError::MalformedInstance(format!(
                    "tour length {} must be positive and finite",
                    tour.length
                )));
            }
        }
        for tour in tours {
            let amount = q / tour.length;
            for (&a, &b) in tour.path.iter().zip(tour.path.iter().cycle().skip(1)) {
                let e = self.trail[a][b].ok_or_else(|| {
                    CnError::MalformedInstance(format!("tour uses missing edge ({a},{b})"))
                })?;
                self.net.edge_payload_mut(e).pheromone += amount;
            }
        }
        Ok(())
    }

    fn check_tour(&self, tour: &Tour) -> Result<()> {
        let n = self.instance.len();
        let mut seen = vec![false; n];
        if tour.path.len() != n
            || !tour.path.iter().all(|&c| c < n && !std::mem::replace(&mut seen[c], true))
        {
            return Err(CnError::config(format!(
                "feedback tour {:?} is not a complete tour of {n} cities",
                tour.path
            )));
        }
        Ok(())
    }
}

impl Instantiation for Colony {
    type Feedback = Vec<Tour>;

    fn input_arity(&self) -> usize {
        0
    }

    fn fast_step(&mut self, _input: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
        self.last_iteration = self.construct_solutions(rng)?;
        Ok(self.readout())
    }

    fn observe(&self, _tick: usize, _input: &[f64], _output: &[f64], fb: &mut Vec<Tour>) {
        fb.extend(self.last_iteration.iter().cloned());
    }

    /// Demon on the iteration-best tour, then evaporation and deposit.
    fn slow_step(&mut self, feedback: &Vec<Tour>, _rng: &mut RngStream) -> Result<()> {
        for t in feedback {
            self.check_tour(t)?;
        }
        let mut tours = feedback.clone();
        if self.params.demon == Demon::TwoOpt {
            if let Some(k) = argmin_tour(&tours) {
                tours[k] = demon_local_search(&self.instance, &tours[k]);
                let improved = tours[k].clone();
                self.offer(&improved);
            }
        }
        self.evaporate(self.params.rho)?;
        self.deposit(&tours, self.params.q)
    }

    /// Best length followed by the best tour's node sequence.
    fn readout(&self) -> Vec<f64> {
        match &self.best {
            Some(t) => std::iter::once(t.length)
                .chain(t.path.iter().map(|&c| c as f64))
                .collect(),
            None => Vec::new(),
        }
    }

    fn best_value(&self, _fb: &Vec<Tour>) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |t| t.length)
    }

    fn shape(&self) -> (usize, usize) {
        (self.net.node_count(), self.net.edge_count())
    }

    fn parameters(&self) -> BTreeMap<String, f64> {
        let taus = self.pheromones();
        let min = taus.iter().copied().fold(f64::INFINITY, f64::min);
        let max = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        BTreeMap::from([
            ("alpha".to_string(), self.params.alpha),
            ("beta".to_string(), self.params.beta),
            ("rho".to_string(), self.params.rho),
            ("q".to_string(), self.params.q),
            ("ants".to_string(), self.params.ants as f64),
            ("pheromone_min".to_string(), min),
            ("pheromone_max".to_string(), max),
        ])
    }
}

fn argmin_tour(tours: &[Tour]) -> Option<usize> {
    tours
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.length.total_cmp(&b.1.length))
        .map(|(k, _)| k)
}
