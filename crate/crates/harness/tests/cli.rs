use std::path::Path;
use std::process::{Command, Output};

use cn_harness::{deterministic_bytes, read_records};

fn cnet(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cnet"));
    cmd.args(args).env_remove("CN_SEED");
    if let Some(s) = env_seed {
        cmd.env("CN_SEED", s);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const PSO: &str = r#"{"pso": {"objective": "rastrigin", "dimension": 3}, "schedule": {"fast_steps_per_slow": 1, "slow_steps": 20}}"#;

#[test]
fn run_writes_header_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "exp.json", r#"{"seed": 1, "eca": {"rule": 110, "width": 17, "steps": 8}}"#);
    let out = cnet(&["run", &cfg], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, records) = read_records(&dir.path().join("exp.jsonl")).unwrap();
    assert_eq!(records.len(), 8);
    let eca = header.config.eca.unwrap();
    assert_eq!(eca.width, 17);
    // Defaults are echoed.
    assert_eq!(header.config.schedule.unwrap().slow_steps, 7);
}

#[test]
fn seed_precedence_flag_file_env() {
    let dir = tempfile::tempdir().unwrap();
    let with_seed = write(dir.path(), "a.json", &PSO.replacen('{', r#"{"seed": 5, "#, 1));
    let without = write(dir.path(), "b.json", PSO);
    let seed_of = |out: &str| {
        let (h, _) = read_records(Path::new(out)).unwrap();
        h.config.seed.unwrap()
    };
    let o = dir.path().join("o.jsonl").to_string_lossy().into_owned();

    assert!(cnet(&["run", &with_seed, "--seed", "9", "--out", &o], Some("3")).status.success());
    assert_eq!(seed_of(&o), 9);
    assert!(cnet(&["run", &with_seed, "--out", &o], Some("3")).status.success());
    assert_eq!(seed_of(&o), 5);
    assert!(cnet(&["run", &without, "--out", &o], Some("3")).status.success());
    assert_eq!(seed_of(&o), 3);
    assert!(cnet(&["run", &without, "--out", &o], None).status.success());
    assert_eq!(seed_of(&o), 0);
}

#[test]
fn rerun_is_byte_identical_apart_from_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.json", PSO);
    let a = dir.path().join("a.jsonl").to_string_lossy().into_owned();
    let b = dir.path().join("b.jsonl").to_string_lossy().into_owned();
    assert!(cnet(&["run", &cfg, "--out", &a], None).status.success());
    assert!(cnet(&["run", &cfg, "--out", &b], None).status.success());
    assert_eq!(
        deterministic_bytes(Path::new(&a)).unwrap(),
        deterministic_bytes(Path::new(&b)).unwrap()
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"eca": {"rule": 300, "width": 9, "steps": 2}}"#);
    assert_eq!(cnet(&["run", &bad], None).status.code(), Some(1));

    let unknown = write(dir.path(), "unknown.json", r#"{"eca": {"rule": 3, "width": 9, "steps": 2}, "extra": 1}"#);
    let out = cnet(&["run", &unknown], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));

    let missing = dir.path().join("nope.json").to_string_lossy().into_owned();
    assert_eq!(cnet(&["run", &missing], None).status.code(), Some(3));

    let bad_env = write(dir.path(), "e.json", r#"{"eca": {"rule": 3, "width": 9, "steps": 2}}"#);
    assert_eq!(cnet(&["run", &bad_env], Some("minus one")).status.code(), Some(1));

    // Values overflow to infinity on the first evaluation.
    let diverge = write(
        dir.path(),
        "d.json",
        r#"{"pso": {"objective": "sphere", "dimension": 2, "bounds": [-1e200, 1e200]}}"#,
    );
    assert_eq!(cnet(&["run", &diverge], None).status.code(), Some(2));
}

#[test]
fn summarize_orders_rows_by_path() {
    let dir = tempfile::tempdir().unwrap();
    for (name, seed) in [("z", 2), ("a", 1), ("m", 3)] {
        let cfg = write(dir.path(), &format!("{name}.json"), &PSO.replacen('{', &format!(r#"{{"seed": {seed}, "#), 1));
        assert!(cnet(&["run", &cfg], None).status.success());
    }
    let pattern = dir.path().join("*.jsonl").to_string_lossy().into_owned();
    let out = cnet(&["summarize", &pattern], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "file,architecture,seed,final_best,iterations,wall_clock_ms");
    assert_eq!(lines.len(), 4);
    let seeds: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(seeds, ["1", "3", "2"]);
    assert!(lines[1].contains(",pso,") && lines[1].contains(",20,"));
}

#[test]
fn eca_render_writes_text_and_pbm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.json", r#"{"eca": {"rule": 90, "width": 9, "steps": 4}}"#);
    let out = cnet(&["eca-render", &cfg], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "000010000");
    assert_eq!(text.lines().nth(1).unwrap(), "000101000");
    assert_eq!(text.lines().count(), 5);
    let pbm = std::fs::read_to_string(dir.path().join("r.pbm")).unwrap();
    assert!(pbm.starts_with("P1\n9 5\n"), "{pbm}");

    let not_eca = write(dir.path(), "p.json", PSO);
    assert_eq!(cnet(&["eca-render", &not_eca], None).status.code(), Some(1));
}

#[test]
fn relative_dataset_resolves_against_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("data")).unwrap();
    write(dir.path(), "data/and.csv", "x0,x1,y0\n0,0,0\n0,1,0\n1,0,0\n1,1,1\n");
    let cfg = write(
        dir.path(),
        "ann.json",
        r#"{"ann": {"layers": [2, 1], "dataset": "data/and.csv", "output_activation": "logistic"},
            "schedule": {"fast_steps_per_slow": 4, "slow_steps": 10}}"#,
    );
    let out = cnet(&["run", &cfg], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
