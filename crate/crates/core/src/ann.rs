//! Feedforward neural networks as computing networks.
//!
//! Neurons are nodes computing `y = A(S(x))` where `S` is the biased weighted
//! sum of incoming synapse values; synapses are directed edges carrying a
//! single weight. The network function is the composition of neuron
//! functions, read from the last layer. The adaptation algorithm is plain
//! backpropagated gradient descent on the mean squared error.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CnError, Result};
use crate::network::{ComputingNetwork, Updating};
use crate::rng::RngStream;
use crate::scale::Instantiation;

/// Half-width of the uniform weight initialisation interval.
pub const INIT_SCALE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    #[default]
    Tanh,
    Logistic,
    Identity,
}

impl Activation {
    pub fn apply(self, s: f64) -> f64 {
        activate(self, s)
    }

    /// dA/dS expressed through the output `y = A(S)`.
    pub fn slope_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Logistic => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

/// `bias + Σ inputs[k]·weights[k]`.
pub fn weighted_sum(inputs: &[f64], weights: &[f64], bias: f64) -> Result<f64> {
    if inputs.len() != weights.len() {
        return Err(CnError::config(format!(
            "weighted_sum: {} inputs but {} weights",
            inputs.len(),
            weights.len()
        )));
    }
    Ok(inputs.iter().zip(weights).fold(bias, |acc, (x, w)| acc + x * w))
}

pub fn activate(kind: Activation, s: f64) -> f64 {
    match kind {
        Activation::Tanh => s.tanh(),
        Activation::Logistic => 1.0 / (1.0 + (-s).exp()),
        Activation::Identity => s,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronPayload {
    pub activation: Activation,
    pub bias: f64,
    /// Output `y_i`.
    pub output: f64,
    /// Pre-activation `S_i`.
    pub pre_activation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynapsePayload {
    pub weight: f64,
}

/// One training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl Sample {
    pub fn new(input: Vec<f64>, target: Vec<f64>) -> Self {
        Self { input, target }
    }
}

/// Per-parameter gradient of the batch MSE.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    /// One entry per synapse, in edge order.
    pub weights: Vec<f64>,
    /// One entry per neuron; entries for input neurons are always zero.
    pub biases: Vec<f64>,
}

/// A fully connected layered network.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    net: ComputingNetwork<NeuronPayload, SynapsePayload>,
    layers: Vec<usize>,
    layer_start: Vec<usize>,
    /// For each neuron, incoming `(edge id, source neuron)` pairs.
    incoming: Vec<Vec<(usize, usize)>>,
}

impl Mlp {
    /// Builds a network with weights and biases drawn uniformly from
    /// `[-INIT_SCALE, INIT_SCALE]`.
    pub fn new(
        layers: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let mut mlp = Self::zeros(layers, hidden, output)?;
        for e in 0..mlp.net.edge_count() {
            mlp.net.edge_payload_mut(e).weight = rng.uniform_in(-INIT_SCALE, INIT_SCALE);
        }
        for i in mlp.layers[0]..mlp.net.node_count() {
            mlp.net.node_mut(i).bias = rng.uniform_in(-INIT_SCALE, INIT_SCALE);
        }
        Ok(mlp)
    }

    /// Builds a network with every weight and bias set to zero.
    pub fn zeros(layers: &[usize], hidden: Activation, output: Activation) -> Result<Self> {
        if layers.len() < 2 {
            return Err(CnError::config("a network needs an input and an output layer"));
        }
        if layers.contains(&0) {
            return Err(CnError::config("layer sizes must be positive"));
        }
        let mut layer_start = Vec::with_capacity(layers.len());
        let mut payloads = Vec::new();
        for (l, &size) in layers.iter().enumerate() {
            layer_start.push(payloads.len());
            let activation = if l == 0 {
                Activation::Identity
            } else if l == layers.len() - 1 {
                output
            } else {
                hidden
            };
            payloads.extend((0..size).map(|_| NeuronPayload {
                activation,
                bias: 0.0,
                output: 0.0,
                pre_activation: 0.0,
            }));
        }
        let n = payloads.len();
        let mut net = ComputingNetwork::new(payloads);
        let mut incoming = vec![Vec::new(); n];
        for l in 0..layers.len() - 1 {
            for i in 0..layers[l] {
                let src = layer_start[l] + i;
                for j in 0..layers[l + 1] {
                    let dst = layer_start[l + 1] + j;
                    let id = net.connect(vec![src, dst], true, SynapsePayload { weight: 0.0 })?;
                    incoming[dst].push((id, src));
                }
            }
        }
        Ok(Self {
            net,
            layers: layers.to_vec(),
            layer_start,
            incoming,
        })
    }

    pub fn with_updating(mut self, updating: Updating) -> Self {
        self.net = self.net.with_updating(updating);
        self
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn network(&self) -> &ComputingNetwork<NeuronPayload, SynapsePayload> {
        &self.net
    }

    pub fn input_arity(&self) -> usize {
        self.layers[0]
    }

    pub fn output_arity(&self) -> usize {
        *self.layers.last().unwrap()
    }

    fn layer_range(&self, l: usize) -> std::ops::Range<usize> {
        self.layer_start[l]..self.layer_start[l] + self.layers[l]
    }

    fn output_range(&self) -> std::ops::Range<usize> {
        self.layer_range(self.layers.len() - 1)
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.net.edge(edge).payload.weight
    }

    pub fn set_weight(&mut self, edge: usize, w: f64) {
        self.net.edge_payload_mut(edge).weight = w;
    }

    pub fn bias(&self, neuron: usize) -> f64 {
        self.net.node(neuron).bias
    }

    pub fn set_bias(&mut self, neuron: usize, b: f64) {
        self.net.node_mut(neuron).bias = b;
    }

    /// Number of trainable values: every weight plus the bias of every
    /// non-input neuron.
    pub fn parameter_count(&self) -> usize {
        self.net.edge_count() + self.net.node_count() - self.layers[0]
    }

    /// Flattened trainable values: weights in edge order, then biases of
    /// non-input neurons in node order.
    pub fn parameters(&self) -> Vec<f64> {
        let weights = self.net.edges().iter().map(|e| e.payload.weight);
        let biases = self.net.nodes()[self.layers[0]..].iter().map(|n| n.payload.bias);
        weights.chain(biases).collect()
    }

    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.parameter_count() {
            return Err(CnError::config(format!(
                "expected {} parameters, got {}",
                self.parameter_count(),
                values.len()
            )));
        }
        let edges = self.net.edge_count();
        for (e, &w) in values[..edges].iter().enumerate() {
            self.set_weight(e, w);
        }
        let first = self.layers[0];
        for (k, &b) in values[edges..].iter().enumerate() {
            self.set_bias(first + k, b);
        }
        Ok(())
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_arity() {
            return Err(CnError::config(format!(
                "input arity {} does not match input layer size {}",
                input.len(),
                self.input_arity()
            )));
        }
        Ok(())
    }

    /// Computes `(S, y)` for every neuron without touching the stored state.
    fn propagate(&self, input: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(input)?;
        let n = self.net.node_count();
        let mut pre = vec![0.0; n];
        let mut out = vec![0.0; n];
        out[..input.len()].copy_from_slice(input);
        pre[..input.len()].copy_from_slice(input);
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for l in 1..self.layers.len() {
            for j in self.layer_range(l) {
                xs.clear();
                ws.clear();
                for &(e, src) in &self.incoming[j] {
                    xs.push(out[src]);
                    ws.push(self.weight(e));
                }
                let neuron = self.net.node(j);
                let s = weighted_sum(&xs, &ws, neuron.bias)?;
                let y = neuron.activation.apply(s);
                if !y.is_finite() {
                    return Err(CnError::diverged(j, format!("neuron output {y}")));
                }
                pre[j] = s;
                out[j] = y;
            }
        }
        Ok((pre, out))
    }

    /// Output of the readout layer for `input`, leaving node state untouched.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        let (_, out) = self.propagate(input)?;
        Ok(out[self.output_range()].to_vec())
    }

    /// Propagates `input` layer by layer, storing `S` and `y` in each neuron,
    /// and returns the readout.
    ///
    /// Within a layer neurons do not feed each other, so every updating mode
    /// produces the same state; the mode only changes the visiting order.
    pub fn forward(&mut self, input: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
        let (pre, out) = self.propagate(input)?;
        let order = self.net.update_order(rng);
        for i in order {
            let node = self.net.node_mut(i);
            node.pre_activation = pre[i];
            node.output = out[i];
        }
        Ok(self.readout())
    }

    /// Outputs currently stored in the readout layer.
    pub fn readout(&self) -> Vec<f64> {
        self.output_range().map(|i| self.net.node(i).output).collect()
    }

    fn check_batch(&self, batch: &[Sample]) -> Result<()> {
        for s in batch {
            self.check_input(&s.input)?;
            if s.target.len() != self.output_arity() {
                return Err(CnError::config(format!(
                    "target arity {} does not match output layer size {}",
                    s.target.len(),
                    self.output_arity()
                )));
            }
        }
        Ok(())
    }

    /// Mean over samples and outputs of `(t - y)^2`. Empty batches give 0.
    pub fn mse(&self, batch: &[Sample]) -> Result<f64> {
        self.check_batch(batch)?;
        if batch.is_empty() {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        for s in batch {
            let y = self.predict(&s.input)?;
            sum += y
                .iter()
                .zip(&s.target)
                .map(|(y, t)| (t - y) * (t - y))
                .sum::<f64>();
        }
        Ok(sum / (batch.len() * self.output_arity()) as f64)
    }

    /// Analytic gradient of [`Mlp::mse`] by backpropagation.
    pub fn gradient(&self, batch: &[Sample]) -> Result<Gradient> {
        self.check_batch(batch)?;
        let n = self.net.node_count();
        let mut grad = Gradient {
            weights: vec![0.0; self.net.edge_count()],
            biases: vec![0.0; n],
        };
        if batch.is_empty() {
            return Ok(grad);
        }
        let scale = 2.0 / (batch.len() * self.output_arity()) as f64;
        let last = self.layers.len() - 1;
        let mut delta = vec![0.0; n];
        for s in batch {
            let (_, out) = self.propagate(&s.input)?;
            delta.iter_mut().for_each(|d| *d = 0.0);
            for (k, j) in self.output_range().enumerate() {
                let slope = self.net.node(j).activation.slope_from_output(out[j]);
                delta[j] = scale * (out[j] - s.target[k]) * slope;
            }
            for l in (1..last).rev() {
                for i in self.layer_range(l) {
                    let mut upstream = 0.0;
                    for j in self.layer_range(l + 1) {
                        let e = self.edge_between(i, j);
                        upstream += self.weight(e) * delta[j];
                    }
                    delta[i] = upstream * self.net.node(i).activation.slope_from_output(out[i]);
                }
            }
            for j in self.layer_start[1]..n {
                grad.biases[j] += delta[j];
                for &(e, src) in &self.incoming[j] {
                    grad.weights[e] += delta[j] * out[src];
                }
            }
        }
        Ok(grad)
    }

    fn edge_between(&self, src: usize, dst: usize) -> usize {
        self.incoming[dst]
            .iter()
            .find(|&&(_, s)| s == src)
            .map(|&(e, _)| e)
            .expect("consecutive layers are fully connected")
    }

    /// One gradient-descent step over `batch`; returns the MSE before the update.
    pub fn train_step(&mut self, batch: &[Sample], learning_rate: f64) -> Result<f64> {
        if !(learning_rate >= 0.0) {
            return Err(CnError::config(format!(
                "learning rate must be non-negative, got {learning_rate}"
            )));
        }
        let loss = self.mse(batch)?;
        let grad = self.gradient(batch)?;
        for (e, g) in grad.weights.iter().enumerate() {
            if !g.is_finite() {
                let dst = self.net.edge(e).endpoints[1];
                return Err(CnError::diverged(dst, format!("weight gradient {g} on edge {e}")));
            }
        }
        if let Some((j, g)) = grad.biases.iter().enumerate().find(|(_, g)| !g.is_finite()) {
            return Err(CnError::diverged(j, format!("bias gradient {g}")));
        }
        for (e, g) in grad.weights.iter().enumerate() {
            let w = self.weight(e) - learning_rate * g;
            self.set_weight(e, w);
        }
        for j in self.layer_start[1]..self.net.node_count() {
            let b = self.bias(j) - learning_rate * grad.biases[j];
            self.set_bias(j, b);
        }
        Ok(loss)
    }
}

/// Labelled examples with fixed input and target arities.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    input_arity: usize,
    target_arity: usize,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(input_arity: usize, target_arity: usize, samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CnError::config("dataset has no samples"));
        }
        for (row, s) in samples.iter().enumerate() {
            if s.input.len() != input_arity || s.target.len() != target_arity {
                return Err(CnError::config(format!(
                    "sample {row} has shape ({}, {}), expected ({input_arity}, {target_arity})",
                    s.input.len(),
                    s.target.len()
                )));
            }
        }
        Ok(Self {
            input_arity,
            target_arity,
            samples,
        })
    }

    /// The four XOR examples with 0/1 targets.
    pub fn xor() -> Self {
        let samples = [(0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)]
            .into_iter()
            .map(|(a, b, t)| Sample::new(vec![a, b], vec![t]))
            .collect();
        Self::new(2, 1, samples).expect("static dataset")
    }

    /// Reads CSV with a header naming every column. Input columns start with
    /// `x`, target columns with `y`, and all inputs precede all targets, e.g.
    /// `x0,x1,y0`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| CnError::config(format!("dataset header: {e}")))?
            .clone();
        let inputs = headers.iter().take_while(|h| h.starts_with('x')).count();
        let targets = headers.len() - inputs;
        if inputs == 0 || targets == 0 || !headers.iter().skip(inputs).all(|h| h.starts_with('y')) {
            return Err(CnError::config(format!(
                "dataset header must list x* input columns then y* target columns, got {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut samples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| CnError::config(format!("dataset row {}: {e}", row + 2)))?;
            let values = record
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| CnError::config(format!("dataset row {}: bad number {v:?}", row + 2)))
                })
                .collect::<Result<Vec<f64>>>()?;
            samples.push(Sample::new(values[..inputs].to_vec(), values[inputs..].to_vec()));
        }
        Self::new(inputs, targets, samples)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv(file)
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn target_arity(&self) -> usize {
        self.target_arity
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// An [`Mlp`] bound to a dataset and a learning rate.
///
/// Each fast step presents the next sample (cycling through the dataset);
/// each slow step trains on the samples presented since the previous one.
#[derive(Debug, Clone)]
pub struct AnnTrainer {
    pub mlp: Mlp,
    pub dataset: Dataset,
    pub learning_rate: f64,
}

impl AnnTrainer {
    pub fn new(mlp: Mlp, dataset: Dataset, learning_rate: f64) -> Result<Self> {
        if mlp.input_arity() != dataset.input_arity() || mlp.output_arity() != dataset.target_arity() {
            return Err(CnError::config(format!(
                "network {:?} does not fit dataset arities ({}, {})",
                mlp.layers(),
                dataset.input_arity(),
                dataset.target_arity()
            )));
        }
        if !(learning_rate >= 0.0) {
            return Err(CnError::config("learning rate must be non-negative"));
        }
        Ok(Self {
            mlp,
            dataset,
            learning_rate,
        })
    }
}

/// Samples seen during one round of fast steps, with their squared error.
#[derive(Debug, Clone, Default)]
pub struct AnnFeedback {
    pub batch: Vec<Sample>,
    pub squared_error: f64,
    pub outputs: usize,
}

impl Instantiation for AnnTrainer {
    type Feedback = AnnFeedback;

    fn input_arity(&self) -> usize {
        self.mlp.input_arity()
    }

    fn next_input(&self, tick: usize) -> Vec<f64> {
        self.dataset.samples()[tick % self.dataset.len()].input.clone()
    }

    fn fast_step(&mut self, input: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
        self.mlp.forward(input, rng)
    }

    fn observe(&self, tick: usize, _input: &[f64], output: &[f64], fb: &mut AnnFeedback) {
        let sample = &self.dataset.samples()[tick % self.dataset.len()];
        fb.squared_error += output
            .iter()
            .zip(&sample.target)
            .map(|(y, t)| (t - y) * (t - y))
            .sum::<f64>();
        fb.outputs += output.len();
        fb.batch.push(sample.clone());
    }

    fn slow_step(&mut self, fb: &AnnFeedback, _rng: &mut RngStream) -> Result<()> {
        self.mlp.train_step(&fb.batch, self.learning_rate).map(|_| ())
    }

    fn readout(&self) -> Vec<f64> {
        self.mlp.readout()
    }

    fn best_value(&self, fb: &AnnFeedback) -> f64 {
        if fb.outputs == 0 {
            0.0
        } else {
            fb.squared_error / fb.outputs as f64
        }
    }

    fn shape(&self) -> (usize, usize) {
        (self.mlp.network().node_count(), self.mlp.network().edge_count())
    }

    fn parameters(&self) -> BTreeMap<String, f64> {
        let params = self.mlp.parameters();
        let norm = params.iter().map(|p| p * p).sum::<f64>().sqrt();
        BTreeMap::from([
            ("learning_rate".to_string(), self.learning_rate),
            ("parameter_norm".to_string(), norm),
        ])
    }
}
