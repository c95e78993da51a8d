use std::path::PathBuf;
use std::process::{Command, Output};

use mv_entropy_cli::{
    cmd_compare, cmd_dynamics, cmd_entropy, cmd_refine, LoadedConfig, OutputValue, ResultRecord, RunOptions,
};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn load(name: &str) -> LoadedConfig {
    LoadedConfig::from_path(&data(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mv-entropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn entropy_of(r: &ResultRecord, key: &str) -> f64 {
    match &r.outputs[key] {
        OutputValue::Entropy(v) => *v,
        other => panic!("{key} is {other:?}"),
    }
}

fn entropies_of(r: &ResultRecord, key: &str) -> Vec<f64> {
    match &r.outputs[key] {
        OutputValue::Entropies(v) => v.clone(),
        other => panic!("{key} is {other:?}"),
    }
}

#[test]
fn entropy_examples() {
    let opts = RunOptions::default();
    let unit_interval = load("unit_interval.toml");
    assert_eq!(
        entropy_of(&cmd_entropy(&unit_interval, "U", &opts).unwrap(), "entropy"),
        0.0
    );
    let b = cmd_entropy(&unit_interval, "B", &opts).unwrap();
    assert!((entropy_of(&b, "entropy") - 0.673_011_667_009_256).abs() < 1e-15);
    let p = cmd_entropy(&load("halves_two_points.toml"), "P", &opts).unwrap();
    assert!((entropy_of(&p, "entropy") - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn refine_examples() {
    let opts = RunOptions::default();
    let unit_interval = load("unit_interval.toml");
    let r = cmd_refine(&unit_interval, &["A".into(), "B".into()], &opts).unwrap();
    assert!((entropy_of(&r, "entropy") - 0.943_348_39).abs() < 1e-8);
    assert_eq!(r.certificates, vec!["exact-vertex-enumeration"]);
    let single = cmd_refine(&unit_interval, &["B".into()], &opts).unwrap();
    assert!((entropy_of(&single, "entropy") - 0.673_011_667_009_256).abs() < 1e-15);
    let crisp = cmd_refine(&load("cycle4.toml"), &["A".into(), "B".into()], &opts).unwrap();
    assert_eq!(crisp.certificates, vec!["crisp-unique"]);
}

#[test]
fn dynamics_examples() {
    let opts = RunOptions::default();
    let unit_interval = load("unit_interval.toml");
    let d = cmd_dynamics(&unit_interval, "A", &opts).unwrap();
    for v in entropies_of(&d, "h_n") {
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }
    assert!((entropy_of(&d, "h_bar") - std::f64::consts::LN_2).abs() < 1e-9);

    let cycle = cmd_dynamics(&load("cycle4.toml"), "A", &opts).unwrap();
    assert_eq!(entropies_of(&cycle, "h_n"), entropies_of(&cycle, "classical_join"));

    let unit = cmd_dynamics(&load("cycle4.toml"), "U", &opts).unwrap();
    assert!(entropies_of(&unit, "h_n").iter().all(|&v| v == 0.0));
}

#[test]
fn compare_examples() {
    let opts = RunOptions {
        n_max: 3,
        ..RunOptions::default()
    };
    let cycle = load("cycle4.toml");
    let same = cmd_compare(&cycle, &cycle, &[0, 1, 2, 3], "F", &opts).unwrap();
    assert_eq!(entropy_of(&same, "max_abs_delta"), 0.0);
    let moved = cmd_compare(&cycle, &load("cycle4_relabeled.toml"), &[2, 0, 3, 1], "F", &opts).unwrap();
    assert_eq!(entropy_of(&moved, "max_abs_delta"), 0.0);
    let err = cmd_compare(&load("skewed.toml"), &load("skewed_target.toml"), &[0, 1], "A", &opts).unwrap_err();
    assert_eq!(err.exit_code(), 5);
}

#[test]
fn binary_text_output() {
    let out = run(&["refine", &path("unit_interval.toml"), "A", "B"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("entropy = 0.94334839 nats"), "{text}");
    assert!(text.contains("certificates: exact-vertex-enumeration"));
    assert!(text.contains("masses = [0 (0.00000000), 1/2 (0.50000000), 2/5 (0.40000000), 1/10 (0.10000000)]"));
}

#[test]
fn binary_bits_and_csv() {
    let out = run(&[
        "entropy",
        &path("halves_two_points.toml"),
        "P",
        "--log-base",
        "2",
        "--output",
        "csv",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("output,index,value,exact,unit\n"));
    assert!(csv.contains("entropy,,1.00000000,,bits\n"), "{csv}");
}

#[test]
fn binary_json_lines_round_trip() {
    let out = run(&[
        "dynamics",
        &path("cycle4.toml"),
        "F",
        "--n-max",
        "3",
        "--output",
        "json-lines",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line = String::from_utf8(out.stdout).unwrap();
    let record = ResultRecord::from_json_line(&line).unwrap();
    assert_eq!(record.to_json_line(), line);
    assert_eq!(record.command, "dynamics");
    assert!(record.timing_ms.is_none());
}

#[test]
fn binary_exit_codes() {
    let bad = run(&["entropy", &path("bad_weights.toml"), "A"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("space.weights"));

    let unknown = run(&["entropy", &path("unit_interval.toml"), "Z"]);
    assert_eq!(unknown.status.code(), Some(2));

    let budget = run(&[
        "refine",
        &path("unit_interval.toml"),
        "A",
        "B",
        "--mode",
        "exact",
        "--max-combos",
        "1",
    ]);
    assert_eq!(budget.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("--mode heuristic"));

    let iso = run(&[
        "compare",
        &path("skewed.toml"),
        &path("skewed_target.toml"),
        "A",
        "--bijection",
        "0,1",
    ]);
    assert_eq!(iso.status.code(), Some(5));

    let not_perm = run(&[
        "compare",
        &path("cycle4.toml"),
        &path("cycle4.toml"),
        "A",
        "--bijection",
        "0,0,1,2",
    ]);
    assert_eq!(not_perm.status.code(), Some(5));

    let exact_float = run(&[
        "refine",
        &path("unit_interval.toml"),
        "A",
        "B",
        "--mode",
        "exact",
        "--numeric",
        "float",
    ]);
    assert_eq!(exact_float.status.code(), Some(2));
}

#[test]
fn float_mode_runs_heuristic() {
    let out = run(&["refine", &path("unit_interval.toml"), "A", "B", "--numeric", "float"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("certificates: heuristic"));
    assert!(text.contains("bound_gap = "));
    assert!(text.contains("entropy = 0.94334839 nats"), "{text}");
}

#[test]
fn timing_is_opt_in() {
    let out = run(&["entropy", &path("unit_interval.toml"), "B", "--timing"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("timing_ms: "));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "dynamics",
        &path("cycle4.toml"),
        "F",
        "--n-max",
        "3",
        "--output",
        "json-lines",
    ];
    let first = run(&args).stdout;
    for _ in 0..3 {
        assert_eq!(run(&args).stdout, first);
    }
}
