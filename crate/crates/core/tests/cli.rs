use std::process::{Command, Output};

use serde_json::Value;

fn tsdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsdp"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = tsdp(&full);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().unwrap(), v)
}

#[test]
fn polymin_json_schema() {
    let (code, v) = json(&["polymin", "data/example1.poly", "--p", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["p"], 5);
    assert_eq!(v["blocks"], 3);
    assert_eq!(v["block_size"], 2);
    assert_eq!(v["constraints"], 27);
    assert_eq!(v["constraints_with_constant"], 28);
    assert_eq!(v["status"], "OPTIMAL");
    assert!(v["bound"].as_f64().unwrap().abs() < 1e-6);
    for key in ["time_build", "time_solve"] {
        assert!(v[key].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn polymin_classic_route() {
    let (code, v) = json(&["polymin", "data/example1.poly", "--p", "1"]);
    assert_eq!(code, 0);
    assert_eq!(
        (v["blocks"].as_u64(), v["block_size"].as_u64()),
        (Some(1), Some(10))
    );
}

#[test]
fn text_and_json_agree() {
    let (_, v) = json(&["polymin", "data/example1.poly", "--p", "5"]);
    let text =
        String::from_utf8(tsdp(&["polymin", "data/example1.poly", "--p", "5"]).stdout).unwrap();
    let bound_line = text.lines().find(|l| l.starts_with("bound")).unwrap();
    let printed: f64 = bound_line
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(printed, v["bound"].as_f64().unwrap());
}

#[test]
fn invalid_tube_size_lists_divisors() {
    let out = tsdp(&["polymin", "data/example1.poly", "--p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("[1, 2, 5, 10]"), "{err}");
}

#[test]
fn infeasible_relaxation_is_non_optimal() {
    let (code, v) = json(&["polymin", "data/example1.poly", "--p", "2"]);
    assert_eq!(code, 1);
    assert!(v["bound"].is_null());
    assert_eq!(v["status"], "INFEASIBLE_SUSPECTED");
}

#[test]
fn parse_errors_report_the_line() {
    let dir = std::env::temp_dir().join(format!("tsdp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.poly");
    std::fs::write(&path, "vars 2\n1 x1^2\n2 y7\n").unwrap();
    let out = tsdp(&["polymin", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
    let odd = dir.join("odd.poly");
    std::fs::write(&odd, "vars 1\n1 x1^3\n").unwrap();
    assert_eq!(
        tsdp(&["polymin", odd.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_file_is_input_error() {
    assert_eq!(tsdp(&["polymin", "no/such.poly"]).status.code(), Some(2));
    assert_eq!(tsdp(&["tnorm", "no/such.json"]).status.code(), Some(2));
    assert_eq!(tsdp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn identity_and_zero_norms() {
    let (code, v) = json(&["tnorm", "identity:3x3"]);
    assert_eq!(code, 0);
    assert!((v["spectral"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["spectral"]["oracle"].as_f64().unwrap(), 1.0);
    let (code, v) = json(&["tnorm", "zeros:2x2x3"]);
    assert_eq!(code, 0);
    for key in ["spectral", "nuclear"] {
        assert!(v[key]["value"].as_f64().unwrap().abs() < 1e-6);
        assert_eq!(v[key]["oracle"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn random_tensor_matches_oracles() {
    let (code, v) = json(&["tnorm", "random:3x3x3", "--seed", "11"]);
    assert_eq!(code, 0);
    for key in ["spectral", "nuclear"] {
        let gap = v[key]["gap"].as_f64().unwrap();
        assert!(
            gap <= 1e-5 * (1.0 + v[key]["oracle"].as_f64().unwrap()),
            "{key}: {gap}"
        );
    }
    let (code, v) = json(&["teig", "randsym:3x3", "--seed", "11"]);
    assert_eq!(code, 0);
    assert!(v["gap"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn tensor_json_file_input() {
    let dir = std::env::temp_dir().join(format!("tsdp-cli-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.json");
    std::fs::write(
        &path,
        r#"{"m":2,"n":2,"p":2,"slices":[[[2,0],[0,1]],[[0.5,0],[0,0]]]}"#,
    )
    .unwrap();
    let (code, v) = json(&["teig", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!((v["value"].as_f64().unwrap() - 2.5).abs() < 1e-6);
    let (code, v) = json(&["iqp", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["bound"].as_f64().unwrap() >= v["oracle"].as_f64().unwrap() - 1e-6);
}

#[test]
fn non_symmetric_teig_input_is_rejected() {
    let out = tsdp(&["teig", "random:3x3x2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_is_deterministic_and_filterable() {
    let a = tsdp(&["selftest", "--seed", "7", "--trials", "20"]);
    let b = tsdp(&["selftest", "--seed", "7", "--trials", "20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (code, v) = json(&["selftest", "--filter", "tcore", "--trials", "5"]);
    assert_eq!(code, 0);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "tcore");
    assert_eq!(
        tsdp(&["selftest", "--filter", "nothing"]).status.code(),
        Some(2)
    );
}
