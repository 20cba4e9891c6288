use std::path::Path;

use cn_harness::config::{parse_config, resolve};
use proptest::prelude::*;

fn section() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..256, 3usize..200, 1i64..100, any::<bool>()).prop_map(|(rule, width, steps, periodic)| {
            let boundary = if periodic { "periodic" } else { "fixed-zero" };
            format!(r#""eca": {{"rule": {rule}, "width": {width}, "steps": {steps}, "boundary": "{boundary}"}}"#)
        }),
        (1usize..8, 0usize..3, 0.0f64..1.0).prop_map(|(dim, f, omega)| {
            let objective = ["sphere", "rosenbrock", "rastrigin"][f];
            format!(r#""pso": {{"objective": "{objective}", "dimension": {dim}, "params": {{"omega": {omega}}}}}"#)
        }),
        (3usize..12, any::<u64>(), 0.01f64..1.0).prop_map(|(cities, seed, rho)| {
            format!(
                r#""aco": {{"graph": {{"random_euclidean": {{"cities": {cities}, "seed": {seed}}}}}, "params": {{"rho": {rho}}}}}"#
            )
        }),
        (1usize..4, 0.01f64..1.0).prop_map(|(hidden, lr)| {
            format!(r#""ann": {{"layers": [2, {hidden}, 1], "dataset": "builtin:xor", "learning_rate": {lr}}}"#)
        }),
    ]
}

proptest! {
    #[test]
    fn load_of_written_config_is_identity(body in section(), seed in proptest::option::of(any::<u64>())) {
        let text = match seed {
            Some(s) => format!("{{\"seed\": {s}, {body}}}"),
            None => format!("{{{body}}}"),
        };
        let cfg = resolve(parse_config(&text).unwrap(), Path::new("."), None).unwrap();
        let again = resolve(parse_config(&cfg.to_json()).unwrap(), Path::new("."), None).unwrap();
        prop_assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_top_level_keys_rejected(key in "[a-z]{3,10}") {
        prop_assume!(!["seed", "output", "schedule", "architecture", "ann", "aco", "pso", "eca", "meta", "cross"]
            .contains(&key.as_str()));
        let text = format!(r#"{{"{key}": 1, "eca": {{"rule": 1, "width": 5, "steps": 1}}}}"#);
        let err = parse_config(&text).unwrap_err().to_string();
        prop_assert!(err.contains(&key), "{}", err);
    }
}
