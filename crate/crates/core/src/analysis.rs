//! Information at the node scale versus the network scale.
//!
//! Given a trace of node states over time, the node-scale information is the
//! sum of each node's own Shannon entropy and the network-scale information
//! is the joint entropy of whole-network rows. Their difference, the
//! interaction excess, is the information that only exists in how nodes relate
//! to each other. All estimates are plug-in (empirical frequency) estimates in
//! bits.

use std::collections::BTreeMap;

use crate::eca::Grid;
use crate::error::{CnError, Result};
use crate::scale::RunRecord;

/// Bin count used when discretising continuous states.
pub const DEFAULT_BINS: usize = 16;

/// A `T × n` matrix of discrete node states (time × node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTrace {
    rows: Vec<Vec<u32>>,
}

impl StateTrace {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n == 0 {
            return Err(CnError::config("trace needs at least one time step and one node"));
        }
        if let Some(t) = rows.iter().position(|r| r.len() != n) {
            return Err(CnError::config(format!("trace row {t} has {} nodes, expected {n}", rows[t].len())));
        }
        Ok(Self { rows })
    }

    pub fn from_grid(grid: &Grid) -> Result<Self> {
        Self::new(
            grid.rows()
                .iter()
                .map(|r| r.iter().map(|&c| c as u32).collect())
                .collect(),
        )
    }

    /// Discretises each node's series into `bins` equal-width bins over that
    /// node's observed range. A constant node maps to bin 0.
    pub fn from_continuous(rows: &[Vec<f64>], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(CnError::config("bin count must be >= 1"));
        }
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(CnError::config("continuous trace rows differ in length"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CnError::config("continuous trace contains non-finite values"));
        }
        let ranges: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                })
            })
            .collect();
        let symbols = rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&ranges)
                    .map(|(&v, &(lo, hi))| {
                        if hi <= lo {
                            0
                        } else {
                            let k = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
                            k.min(bins - 1) as u32
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(symbols)
    }

    /// Uses each record's network output as one row.
    pub fn from_records(records: &[RunRecord], bins: usize) -> Result<Self> {
        let rows: Vec<Vec<f64>> = records.iter().map(|r| r.network_output.clone()).collect();
        Self::from_continuous(&rows, bins)
    }

    pub fn steps(&self) -> usize {
        self.rows.len()
    }

    pub fn nodes(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Relabels nodes: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.nodes()];
        if perm.len() != self.nodes() || !perm.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true)) {
            return Err(CnError::config("not a permutation of the trace's nodes"));
        }
        Self::new(
            self.rows
                .iter()
                .map(|r| perm.iter().map(|&p| r[p]).collect())
                .collect(),
        )
    }
}

/// Entropy in bits of an empirical distribution given by counts.
fn entropy_from_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let total = total as f64;
    let h: f64 = counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // Avoid reporting -0.0 for degenerate distributions.
    h.max(0.0)
}

/// Sum over nodes of each node's empirical entropy.
pub fn node_scale_info(trace: &StateTrace) -> f64 {
    (0..trace.nodes())
        .map(|j| {
            let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
            for row in trace.rows() {
                *counts.entry(row[j]).or_default() += 1;
            }
            entropy_from_counts(counts.into_values(), trace.steps())
        })
        .sum()
}

/// Empirical joint entropy of whole-network rows.
pub fn network_scale_info(trace: &StateTrace) -> f64 {
    let mut counts: BTreeMap<&[u32], usize> = BTreeMap::new();
    for row in trace.rows() {
        *counts.entry(row.as_slice()).or_default() += 1;
    }
    entropy_from_counts(counts.into_values(), trace.steps())
}

/// Node-scale minus network-scale information.
pub fn interaction_excess(trace: &StateTrace) -> f64 {
    node_scale_info(trace) - network_scale_info(trace)
}

/// Number of distinct whole-network rows in the trace.
pub fn distinct_rows(trace: &StateTrace) -> usize {
    let mut rows: Vec<&[u32]> = trace.rows().iter().map(Vec::as_slice).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.len()
}
