//! Elementary cellular automata.
//!
//! Cells are nodes with a binary state; each cell's neighbourhood (left, self,
//! right) is a hyperedge. Rules use Wolfram numbering: bit `k` of the rule
//! number is the next state for the neighbourhood whose three cells read as
//! the binary number `k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{CnError, Result};
use crate::network::{ComputingNetwork, Updating};
use crate::rng::RngStream;
use crate::scale::Instantiation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Cells beyond the edges are permanently 0.
    #[default]
    FixedZero,
    Periodic,
}

/// Next state for each of the eight neighbourhoods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleTable {
    number: u8,
    outputs: [u8; 8],
}

impl RuleTable {
    pub fn new(number: u8) -> Self {
        let mut outputs = [0u8; 8];
        for (k, out) in outputs.iter_mut().enumerate() {
            *out = (number >> k) & 1;
        }
        Self { number, outputs }
    }

    pub fn number(&self) -> u8 {
        self.number
    }

    pub fn apply(&self, left: u8, center: u8, right: u8) -> u8 {
        self.outputs[((left << 2) | (center << 1) | right) as usize]
    }

    /// `(neighbourhood, next)` rows from `000` to `111`.
    pub fn rows(&self) -> [([u8; 3], u8); 8] {
        std::array::from_fn(|k| {
            let k = k as u8;
            ([(k >> 2) & 1, (k >> 1) & 1, k & 1], self.outputs[k as usize])
        })
    }
}

/// Checked constructor for rule numbers arriving as wider integers.
pub fn rule_table(rule_number: i64) -> Result<RuleTable> {
    u8::try_from(rule_number)
        .map(RuleTable::new)
        .map_err(|_| CnError::config(format!("rule number {rule_number} outside 0..=255")))
}

/// A row of binary cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tape {
    cells: Vec<u8>,
    boundary: Boundary,
}

impl Tape {
    pub fn new(cells: Vec<u8>, boundary: Boundary) -> Result<Self> {
        if cells.len() < 3 {
            return Err(CnError::config(format!("tape needs at least 3 cells, got {}", cells.len())));
        }
        if let Some(i) = cells.iter().position(|&c| c > 1) {
            return Err(CnError::config(format!("cell {i} is {} (must be 0 or 1)", cells[i])));
        }
        Ok(Self { cells, boundary })
    }

    /// All zeros except a 1 at the centre cell `width / 2`.
    pub fn single_one(width: usize, boundary: Boundary) -> Result<Self> {
        let mut cells = vec![0; width];
        if width > 0 {
            cells[width / 2] = 1;
        }
        Self::new(cells, boundary)
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn neighbor(&self, i: usize, offset: isize) -> u8 {
        let n = self.cells.len() as isize;
        let j = i as isize + offset;
        match self.boundary {
            Boundary::Periodic => self.cells[j.rem_euclid(n) as usize],
            Boundary::FixedZero if (0..n).contains(&j) => self.cells[j as usize],
            Boundary::FixedZero => 0,
        }
    }

    /// One synchronous update.
    pub fn step(&self, rule: &RuleTable) -> Tape {
        let cells = (0..self.cells.len())
            .map(|i| rule.apply(self.neighbor(i, -1), self.cells[i], self.neighbor(i, 1)))
            .collect();
        Tape {
            cells,
            boundary: self.boundary,
        }
    }

    pub fn population(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }
}

/// Space-time diagram: row `t` is the tape after `t` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    rows: Vec<Vec<u8>>,
}

impl Grid {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// One line per row, characters `0` and `1`, newline-terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * (self.width() + 1));
        for row in &self.rows {
            s.extend(row.iter().map(|&c| if c == 1 { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    /// Parses the output of [`Grid::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(r, line)| {
                line.trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(CnError::config(format!("grid row {r}: unexpected {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.is_empty() {
            return Err(CnError::config("grid has no rows"));
        }
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(CnError::config("grid rows have different widths"));
        }
        Ok(Self { rows })
    }

    /// Plain PBM (`P1`). Cell value 1 is written as PBM 1 (black).
    pub fn to_pbm(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "P1\n{} {}", self.width(), self.rows.len());
        for row in &self.rows {
            let line: Vec<&str> = row.iter().map(|&c| if c == 1 { "1" } else { "0" }).collect();
            // PBM lines should stay under 70 characters.
            for chunk in line.chunks(35) {
                s.push_str(&chunk.join(" "));
                s.push('\n');
            }
        }
        s
    }
}

/// Rows `0..=steps` of the evolution of `tape`.
pub fn evolve(tape: &Tape, rule: &RuleTable, steps: i64) -> Result<Grid> {
    if steps < 0 {
        return Err(CnError::config(format!("steps must be >= 0, got {steps}")));
    }
    let mut rows = Vec::with_capacity(steps as usize + 1);
    let mut current = tape.clone();
    rows.push(current.cells.clone());
    for _ in 0..steps {
        current = current.step(rule);
        rows.push(current.cells.clone());
    }
    Ok(Grid { rows })
}

/// Which neighbours a cell's hyperedge includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// An automaton expressed as a computing network.
///
/// Cell `i` owns a directed hyperedge `[i, left, right]` (neighbours missing
/// at a fixed boundary are omitted). Only the fast scale does anything: the
/// rule is never adapted, so the slow step leaves the network untouched.
#[derive(Debug, Clone)]
pub struct EcaNetwork {
    rule: RuleTable,
    boundary: Boundary,
    net: ComputingNetwork<u8, Neighborhood>,
}

impl EcaNetwork {
    pub fn new(tape: &Tape, rule: RuleTable) -> Result<Self> {
        let n = tape.len();
        let mut net = ComputingNetwork::new(tape.cells().iter().copied()).with_hyperedges();
        for i in 0..n {
            let (left, right) = match tape.boundary() {
                Boundary::Periodic => (Some((i + n - 1) % n), Some((i + 1) % n)),
                Boundary::FixedZero => (i.checked_sub(1), (i + 1 < n).then_some(i + 1)),
            };
            let endpoints: Vec<usize> = std::iter::once(i).chain(left).chain(right).collect();
            net.connect(endpoints, true, Neighborhood { left, right })?;
        }
        Ok(Self {
            rule,
            boundary: tape.boundary(),
            net,
        })
    }

    pub fn with_updating(mut self, updating: Updating) -> Self {
        self.net = self.net.with_updating(updating);
        self
    }

    pub fn network(&self) -> &ComputingNetwork<u8, Neighborhood> {
        &self.net
    }

    pub fn rule(&self) -> RuleTable {
        self.rule
    }

    pub fn tape(&self) -> Tape {
        Tape {
            cells: self.net.nodes().iter().map(|n| n.payload).collect(),
            boundary: self.boundary,
        }
    }

    /// Next state of cell `i` read through its hyperedge.
    pub fn next_state(net: &ComputingNetwork<u8, Neighborhood>, rule: &RuleTable, i: usize) -> u8 {
        // Cell i's own hyperedge is edge i.
        let hood = net.edge(i).payload;
        let left = hood.left.map_or(0, |j| *net.node(j));
        let right = hood.right.map_or(0, |j| *net.node(j));
        rule.apply(left, *net.node(i), right)
    }

    pub fn step(&mut self, rng: &mut RngStream) -> Result<()> {
        let rule = self.rule;
        self.net.update_nodes(rng, |net, i| Ok(Self::next_state(net, &rule, i)))
    }
}

impl Instantiation for EcaNetwork {
    type Feedback = ();

    fn input_arity(&self) -> usize {
        0
    }

    fn fast_step(&mut self, _input: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
        self.step(rng)?;
        Ok(self.readout())
    }

    fn observe(&self, _tick: usize, _input: &[f64], _output: &[f64], _fb: &mut ()) {}

    fn slow_step(&mut self, _fb: &(), _rng: &mut RngStream) -> Result<()> {
        Ok(())
    }

    fn readout(&self) -> Vec<f64> {
        self.net.nodes().iter().map(|n| n.payload as f64).collect()
    }

    /// Number of live cells.
    fn best_value(&self, _fb: &()) -> f64 {
        self.net.nodes().iter().filter(|n| n.payload == 1).count() as f64
    }

    fn shape(&self) -> (usize, usize) {
        (self.net.node_count(), self.net.edge_count())
    }

    fn parameters(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("rule".to_string(), self.rule.number() as f64)])
    }
}
