use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bellinfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellinfo"))
        .args(args)
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bellinfo"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

const CHSH_SETTINGS: &str = r#"{"pairs":[
    {"n1":[1,0,0],"n2":[0,1,0]},
    {"n1":[-0.7071067811865476,0.7071067811865476,0],"n2":[-0.7071067811865476,-0.7071067811865476,0]}
]}"#;

const PARALLEL_SETTINGS: &str = r#"{"pairs":[
    {"n1":[1,0,0],"n2":[1,0,0]},
    {"n1":[1,0,0],"n2":[1,0,0]}
]}"#;

#[test]
fn maximally_mixed_single_qubit_tensor() {
    let v = json(&bellinfo(&["tensor", "--preset", "maximally_mixed", "--n", "1"]));
    assert_eq!(v["entries"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(v["order"], "xN_fastest");
    assert_eq!(v["labels"], serde_json::json!(["0", "x", "y", "z"]));
}

#[test]
fn phi_minus_tensor_signs() {
    let v = json(&bellinfo(&["tensor", "--preset", "bell_phi_minus"]));
    let e = v["entries"].as_array().unwrap();
    let at = |i: usize| e[i].as_f64().unwrap();
    assert!((at(5) + 1.0).abs() < 1e-12, "T_xx");
    assert!((at(10) - 1.0).abs() < 1e-12, "T_yy");
    assert!((at(15) - 1.0).abs() < 1e-12, "T_zz");
}

#[test]
fn tensor_csv_has_full_labels() {
    let out = bellinfo(&["tensor", "--preset", "bell_phi_minus", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("label,value\n00,1\n"));
    assert!(text.contains("\nxx,-1\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn state_file_from_stdin() {
    let state = r#"{"vector":{"n_qubits":1,"amplitudes":[[1,0],[0,0]]}}"#;
    let v = json(&with_stdin(&["tensor", "-i", "-"], state));
    assert_eq!(v["entries"], serde_json::json!([1.0, 0.0, 0.0, 1.0]));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(
        with_stdin(&["tensor", "-i", "-"], "{\"matrix\": [").status.code(),
        Some(2)
    );
    assert_eq!(
        with_stdin(&["tensor", "-i", "-"], "{\"unknown\": 1}").status.code(),
        Some(2)
    );
    let not_psd = r#"{"matrix":{"n_qubits":1,"entries":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}}"#;
    assert_eq!(with_stdin(&["tensor", "-i", "-"], not_psd).status.code(), Some(2));
    assert_eq!(
        bellinfo(&["tensor", "-i", "/nonexistent/state.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bellinfo(&["tensor", "--preset", "no_such_state"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bellinfo(&["tensor", "--preset", "werner_ghz", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bellinfo(&["tensor"]).status.code(), Some(2));
    assert_eq!(bellinfo(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bellinfo(&["info", "--preset", "ghz", "--format", "csv"]).status.code(),
        Some(2)
    );
    let out = bellinfo(&["tensor", "--preset", "ghz", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn same_seed_gives_identical_bytes() {
    for cmd in ["info", "bell", "analyze"] {
        let args = [
            cmd,
            "--preset",
            "werner_ghz",
            "--n",
            "3",
            "--visibility",
            "0.7",
            "--seed",
            "5",
            "--restarts",
            "6",
        ];
        let a = bellinfo(&args);
        let b = bellinfo(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn out_flag_writes_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["info", "--preset", "ghz", "--n", "3", "--restarts", "4"];
    let stdout = bellinfo(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = bellinfo(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn info_reports_bell_state_maximum() {
    let v = json(&bellinfo(&["info", "--preset", "bell_phi_minus"]));
    assert!((v["max_total"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["entangled"], true);
    assert_eq!(v["per_index"].as_object().unwrap().len(), 4);
}

#[test]
fn bell_with_fixed_settings() {
    let settings = temp_file(CHSH_SETTINGS);
    let v = json(&bellinfo(&[
        "bell",
        "--preset",
        "bell_phi_minus",
        "--settings",
        settings.path().to_str().unwrap(),
    ]));
    assert!((v["lhs"].as_f64().unwrap() - 4.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    assert_eq!(v["violated"], true);
    assert!(v.get("optimizer").is_none());
    assert_eq!(v["per_s"].as_array().unwrap().len(), 4);
}

#[test]
fn lhv_model_for_local_settings() {
    let settings = temp_file(PARALLEL_SETTINGS);
    let v = json(&bellinfo(&[
        "lhv",
        "--preset",
        "bell_phi_minus",
        "--settings",
        settings.path().to_str().unwrap(),
    ]));
    assert!(v["max_abs_error"].as_f64().unwrap() <= 1e-10);
    let atoms = v["model"]["atoms"].as_array().unwrap();
    let mass: f64 =
        atoms.iter().map(|a| a["p"].as_f64().unwrap()).sum::<f64>() + v["model"]["noise_weight"].as_f64().unwrap();
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn lhv_refuses_violating_settings() {
    let settings = temp_file(CHSH_SETTINGS);
    let out = bellinfo(&[
        "lhv",
        "--preset",
        "bell_phi_minus",
        "--settings",
        settings.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("violat"));
}

#[test]
fn werner_scan_csv() {
    let out = bellinfo(&["werner-scan", "--n", "3", "--grid", "11", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "V,info_sum,bell_lhs,bell_ratio,info_entangled,bell_violated");
    assert_eq!(lines.len(), 12);
    assert!(lines[6].starts_with("0.5,") && lines[6].ends_with("false,false"));
    assert!(lines[7].ends_with("true,true"));
    assert_eq!(
        bellinfo(&["werner-scan", "--n", "3", "--grid", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn analyze_never_reports_violation_without_entanglement() {
    let cases: &[&[&str]] = &[
        &["--preset", "werner_ghz", "--n", "2", "--visibility", "0.7"],
        &["--preset", "werner_ghz", "--n", "3", "--visibility", "0.49"],
        &["--preset", "product_plus_x_minus_x"],
        &["--preset", "maximally_mixed", "--n", "3"],
        &["--preset", "werner_ghz", "--n", "2", "--visibility", "0.72"],
        &["--preset", "ghz", "--n", "3"],
    ];
    for case in cases {
        let mut args = vec!["analyze", "--restarts", "8"];
        args.extend_from_slice(case);
        let v = json(&bellinfo(&args));
        let entangled = v["info"]["entangled"].as_bool().unwrap();
        let violated = v["bell"]["violated"].as_bool().unwrap();
        assert!(entangled || !violated, "{case:?}");
        assert_eq!(v["lhv"].is_null(), violated, "{case:?}");
    }
}
