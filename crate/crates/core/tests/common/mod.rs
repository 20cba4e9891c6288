#![allow(dead_code)]

use compnet::aco::TspInstance;
use compnet::ann::{Mlp, Sample};

/// Shortest closed tour by enumerating every permutation that starts at city 0.
pub fn brute_force_optimum(inst: &TspInstance) -> f64 {
    fn permute(rest: &mut Vec<usize>, k: usize, inst: &TspInstance, best: &mut f64) {
        if k == rest.len() {
            let mut tour = vec![0];
            tour.extend_from_slice(rest);
            let len: f64 = (0..tour.len())
                .map(|i| inst.cost(tour[i], tour[(i + 1) % tour.len()]))
                .sum();
            *best = best.min(len);
            return;
        }
        for i in k..rest.len() {
            rest.swap(k, i);
            permute(rest, k + 1, inst, best);
            rest.swap(k, i);
        }
    }
    let mut rest: Vec<usize> = (1..inst.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, inst, &mut best);
    best
}

/// Number of distinct undirected tours over `n` cities: (n-1)!/2.
pub fn distinct_tours(n: usize) -> usize {
    (1..n).product::<usize>() / 2
}

/// Central finite-difference gradient of the batch MSE over the flattened
/// parameter vector, using only `predict` to evaluate the loss.
pub fn finite_difference_gradient(mlp: &Mlp, batch: &[Sample], h: f64) -> Vec<f64> {
    let loss = |m: &Mlp| -> f64 {
        let mut sum = 0.0;
        let mut count = 0;
        for s in batch {
            let y = m.predict(&s.input).unwrap();
            for (y, t) in y.iter().zip(&s.target) {
                sum += (t - y) * (t - y);
                count += 1;
            }
        }
        sum / count as f64
    };
    let base = mlp.parameters();
    (0..base.len())
        .map(|k| {
            let mut plus = mlp.clone();
            let mut p = base.clone();
            p[k] += h;
            plus.set_parameters(&p).unwrap();
            let mut minus = mlp.clone();
            p[k] -= 2.0 * h;
            minus.set_parameters(&p).unwrap();
            (loss(&plus) - loss(&minus)) / (2.0 * h)
        })
        .collect()
}

/// Analytic gradient flattened in the same order as `Mlp::parameters`.
pub fn flat_gradient(mlp: &Mlp, batch: &[Sample]) -> Vec<f64> {
    let g = mlp.gradient(batch).unwrap();
    let first_hidden = mlp.layers()[0];
    g.weights
        .iter()
        .copied()
        .chain(g.biases[first_hidden..].iter().copied())
        .collect()
}

/// Relative error with a floor on the denominator so that gradients that
/// are zero up to rounding compare absolutely.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Rule 110 written out row by row, independent of any bit arithmetic.
pub fn table_110(left: u8, center: u8, right: u8) -> u8 {
    match (left, center, right) {
        (0, 0, 0) => 0,
        (0, 0, 1) => 1,
        (0, 1, 0) => 1,
        (0, 1, 1) => 1,
        (1, 0, 0) => 0,
        (1, 0, 1) => 1,
        (1, 1, 0) => 1,
        (1, 1, 1) => 0,
        _ => unreachable!(),
    }
}

/// Naive fixed-zero-boundary evolution from a single 1 at the centre.
pub fn naive_rule_110(width: usize, steps: usize) -> Vec<Vec<u8>> {
    let mut row = vec![0u8; width];
    row[width / 2] = 1;
    let mut rows = vec![row.clone()];
    for _ in 0..steps {
        let mut next = vec![0u8; width];
        for i in 0..width {
            let l = if i == 0 { 0 } else { row[i - 1] };
            let r = if i + 1 == width { 0 } else { row[i + 1] };
            next[i] = table_110(l, row[i], r);
        }
        rows.push(next.clone());
        row = next;
    }
    rows
}
