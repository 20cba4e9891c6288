//! The generic substrate: nodes, (hyper)edges and node-update semantics.
//!
//! A [`ComputingNetwork`] stores the state of nodes `N` and edges `K`. The
//! adaptation algorithm `a` and the network function `f` are supplied by the
//! architecture that owns the network, through the
//! [`Instantiation`](crate::scale::Instantiation) trait. Topology is fixed at
//! construction: there is no API to add or remove nodes or edges once a
//! network is built, only to change payloads.

use serde::{Deserialize, Serialize};

use crate::error::{CnError, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct Node<P> {
    pub id: usize,
    pub payload: P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<P> {
    pub id: usize,
    /// Ordered endpoints. More than two marks a hyperedge.
    pub endpoints: Vec<usize>,
    pub directed: bool,
    pub payload: P,
}

impl<P> Edge<P> {
    pub fn is_hyperedge(&self) -> bool {
        self.endpoints.len() > 2
    }
}

/// Order in which node updates within a step see each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Updating {
    /// Every update reads the pre-step state.
    #[default]
    Synchronous,
    /// Nodes update in index order, each seeing earlier updates.
    AsynchronousFixedOrder,
    /// Nodes update in a fresh random order per step.
    AsynchronousRandomOrder,
}

/// Nodes linked by edges, with stable ordering and fixed topology.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputingNetwork<N, E> {
    nodes: Vec<Node<N>>,
    edges: Vec<Edge<E>>,
    incidence: Vec<Vec<usize>>,
    hyperedges: bool,
    updating: Updating,
}

impl<N, E> ComputingNetwork<N, E> {
    /// A network with the given node payloads and no edges yet.
    pub fn new(payloads: impl IntoIterator<Item = N>) -> Self {
        let nodes: Vec<Node<N>> = payloads
            .into_iter()
            .enumerate()
            .map(|(id, payload)| Node { id, payload })
            .collect();
        let incidence = vec![Vec::new(); nodes.len()];
        Self {
            nodes,
            edges: Vec::new(),
            incidence,
            hyperedges: false,
            updating: Updating::Synchronous,
        }
    }

    /// Allows edges with more than two endpoints.
    pub fn with_hyperedges(mut self) -> Self {
        self.hyperedges = true;
        self
    }

    pub fn with_updating(mut self, updating: Updating) -> Self {
        self.updating = updating;
        self
    }

    /// Adds an edge and returns its id.
    ///
    /// Only used while assembling an instantiation; every endpoint must name
    /// an existing node.
    pub fn connect(&mut self, endpoints: Vec<usize>, directed: bool, payload: E) -> Result<usize> {
        if endpoints.is_empty() {
            return Err(CnError::config("edge with no endpoints"));
        }
        if let Some(&bad) = endpoints.iter().find(|&&e| e >= self.nodes.len()) {
            return Err(CnError::config(format!(
                "edge endpoint {bad} out of range (network has {} nodes)",
                self.nodes.len()
            )));
        }
        if endpoints.len() != 2 && !self.hyperedges {
            return Err(CnError::config(format!(
                "edge with {} endpoints requires hyperedge support",
                endpoints.len()
            )));
        }
        let id = self.edges.len();
        for &e in &endpoints {
            if !self.incidence[e].contains(&id) {
                self.incidence[e].push(id);
            }
        }
        self.edges.push(Edge {
            id,
            endpoints,
            directed,
            payload,
        });
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node<N>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<E>] {
        &self.edges
    }

    pub fn node(&self, id: usize) -> &N {
        &self.nodes[id].payload
    }

    pub fn node_mut(&mut self, id: usize) -> &mut N {
        &mut self.nodes[id].payload
    }

    pub fn edge(&self, id: usize) -> &Edge<E> {
        &self.edges[id]
    }

    pub fn edge_payload_mut(&mut self, id: usize) -> &mut E {
        &mut self.edges[id].payload
    }

    /// Ids of edges touching `node`, in edge order.
    pub fn incident(&self, node: usize) -> &[usize] {
        &self.incidence[node]
    }

    pub fn node_payloads_mut(&mut self) -> impl Iterator<Item = &mut N> {
        self.nodes.iter_mut().map(|n| &mut n.payload)
    }

    pub fn edge_payloads_mut(&mut self) -> impl Iterator<Item = &mut E> {
        self.edges.iter_mut().map(|e| &mut e.payload)
    }

    pub fn supports_hyperedges(&self) -> bool {
        self.hyperedges
    }

    pub fn updating(&self) -> Updating {
        self.updating
    }

    /// Node visiting order for one step under the network's updating mode.
    pub fn update_order(&self, rng: &mut RngStream) -> Vec<usize> {
        match self.updating {
            Updating::AsynchronousRandomOrder => rng.permutation(self.nodes.len()),
            _ => (0..self.nodes.len()).collect(),
        }
    }

    /// Applies `rule` to every node once.
    ///
    /// `rule(net, i)` computes the next payload of node `i`. Synchronous mode
    /// evaluates all rules against the pre-step network and then commits;
    /// the asynchronous modes commit each result before evaluating the next.
    pub fn update_nodes<F>(&mut self, rng: &mut RngStream, mut rule: F) -> Result<()>
    where
        F: FnMut(&Self, usize) -> Result<N>,
    {
        let order = self.update_order(rng);
        match self.updating {
            Updating::Synchronous => {
                let mut next = Vec::with_capacity(order.len());
                for &i in &order {
                    next.push((i, rule(self, i)?));
                }
                for (i, payload) in next {
                    self.nodes[i].payload = payload;
                }
            }
            Updating::AsynchronousFixedOrder | Updating::AsynchronousRandomOrder => {
                for i in order {
                    let payload = rule(self, i)?;
                    self.nodes[i].payload = payload;
                }
            }
        }
        Ok(())
    }
}
