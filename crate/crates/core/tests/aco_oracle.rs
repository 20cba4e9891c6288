mod common;

use common::{brute_force_optimum, distinct_tours};
use compnet::aco::{
    demon_local_search, transition_probabilities, AcoParams, Candidate, Colony, Demon, Tour,
    TrailPayload, TspInstance,
};
use compnet::rng::RngStream;
use compnet::scale::{run, Instantiation, ScaleSchedule};
use proptest::prelude::*;

fn instance(seed: u64, n: usize) -> TspInstance {
    TspInstance::random_euclidean(n, &mut RngStream::new(seed)).unwrap()
}

#[test]
fn oracle_counts_twelve_tours_for_five_cities() {
    assert_eq!(distinct_tours(5), 12);
}

#[test]
fn five_city_runs_reach_brute_force_optimum() {
    let mut hits = 0;
    for seed in 1..=20u64 {
        let inst = instance(1000 + seed, 5);
        let optimum = brute_force_optimum(&inst);
        let mut colony = Colony::new(inst, AcoParams::default()).unwrap();
        let records = run(&mut colony, &ScaleSchedule::new(1, 49), &mut RngStream::new(seed)).unwrap();
        assert_eq!(records.len(), 50);
        if (records.last().unwrap().best_value - optimum).abs() < 1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 18, "optimum reached in {hits}/20 runs");
}

#[test]
fn pheromone_floor_and_best_monotonicity() {
    for demon in [Demon::Off, Demon::TwoOpt] {
        let params = AcoParams { demon, rho: 0.5, ..Default::default() };
        let mut colony = Colony::new(instance(77, 12), params).unwrap();
        let mut rng = RngStream::new(5);
        let mut prev = f64::INFINITY;
        let mut fb = Vec::new();
        for tick in 0..60 {
            let out = colony.fast_step(&[], &mut rng).unwrap();
            fb.clear();
            colony.observe(tick, &[], &out, &mut fb);
            let best = colony.best_path().unwrap().length;
            assert!(best <= prev);
            prev = best;
            colony.slow_step(&fb, &mut rng).unwrap();
            assert!(colony.pheromones().iter().all(|&t| t >= params.tau_min));
        }
    }
}

#[test]
fn evaporation_only_decays_geometrically() {
    let params = AcoParams { tau_min: 0.0, rho: 0.2, ..Default::default() };
    let mut colony = Colony::new(instance(3, 6), params).unwrap();
    for k in 1..=30 {
        colony.evaporate(params.rho).unwrap();
        let expected = 0.8f64.powi(k);
        assert!(colony.pheromones().iter().all(|&t| (t - expected).abs() < 1e-15));
    }
}

#[test]
fn tour_lengths_match_recomputation() {
    let inst = instance(9, 9);
    let mut colony = Colony::new(inst.clone(), AcoParams::default()).unwrap();
    let tours = colony.construct_solutions(&mut RngStream::new(2)).unwrap();
    for t in tours {
        let mut recomputed = 0.0;
        for i in 0..t.path.len() {
            recomputed += inst.cost(t.path[i], t.path[(i + 1) % t.path.len()]);
        }
        assert!((t.length - recomputed).abs() < 1e-12);
    }
}

#[test]
fn two_opt_lands_between_input_and_optimum() {
    for seed in 0..30 {
        let inst = instance(seed, 6);
        let path: Vec<usize> = RngStream::new(seed).permutation(6);
        let tour = Tour { length: inst.tour_length(&path), path };
        let out = demon_local_search(&inst, &tour);
        assert!(out.length <= tour.length + 1e-12);
        assert!(out.length >= brute_force_optimum(&inst) - 1e-12);
    }
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(
        trails in prop::collection::vec((0.0f64..10.0, 0.01f64..10.0), 1..12),
        alpha in 0.0f64..4.0,
        beta in 0.0f64..4.0,
    ) {
        let payloads: Vec<TrailPayload> = trails
            .iter()
            .map(|&(tau, eta)| TrailPayload { cost: 1.0 / eta, heuristic: eta, pheromone: tau })
            .collect();
        let candidates: Vec<Candidate> = payloads
            .iter()
            .enumerate()
            .map(|(node, trail)| Candidate { node, trail })
            .collect();
        let params = AcoParams { alpha, beta, ..Default::default() };
        let probs = transition_probabilities(&candidates, &params);
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(probs.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn demon_never_lengthens_and_is_idempotent(seed in 0u64..5000, n in 4usize..14) {
        let inst = instance(seed, n);
        let path = RngStream::new(seed ^ 0xabc).permutation(n);
        let tour = Tour { length: inst.tour_length(&path), path };
        let once = demon_local_search(&inst, &tour);
        prop_assert!(once.length <= tour.length + 1e-12);
        let twice = demon_local_search(&inst, &once);
        prop_assert_eq!(twice, once);
    }
}
