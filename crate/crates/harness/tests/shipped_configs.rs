use std::path::PathBuf;

use cn_harness::{load_config_with, run_config, Architecture};

fn configs() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn every_shipped_config_loads() {
    let all = configs();
    assert!(all.len() >= 6);
    for path in all {
        let cfg = load_config_with(&path, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.seed.is_some());
    }
}

#[test]
fn shipped_configs_run_with_a_short_schedule() {
    for path in configs() {
        let mut cfg = load_config_with(&path, None).unwrap();
        let mut schedule = cfg.schedule();
        schedule.slow_steps = schedule.slow_steps.min(5);
        schedule.meta_generations = schedule.meta_generations.min(1);
        cfg.schedule = Some(schedule);
        if let Some(meta) = cfg.meta.as_mut() {
            meta.budget = Some(5);
            meta.population = 4;
        }
        let records = run_config(&cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let expected = match cfg.meta {
            Some(_) => 2,
            None => 6,
        };
        assert_eq!(records.len(), expected, "{}", path.display());
        if cfg.architecture() != Architecture::Eca {
            assert!(records.last().unwrap().best_value.is_finite());
        }
    }
}
