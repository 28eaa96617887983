use std::process::{Command, Output};

use serde_json::Value;

fn wqcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wqcm"))
        .args(args)
        .env_remove("WQCM_SEED")
        .output()
        .expect("run wqcm")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn check_all_on_sasakian_passes_as_json() {
    let out = wqcm(&["check", "all", "builtin:sasakian-r3", "--format", "json", "--points", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "all");
    assert_eq!(v["seed"], 7);
    assert!(v["timestamp"].as_u64().unwrap() > 1_600_000_000);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["verdict"] != "fail"));
    let asserted = checks.iter().filter(|c| c["verdict"] == "pass").count();
    assert!(asserted > 40, "{asserted}");
}

#[test]
fn classify_reports_without_asserting() {
    let out = wqcm(&["classify", "builtin:scaled?s=2", "--format", "json", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let quasi = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["class"] == "quasi")
        .unwrap();
    assert_eq!(quasi["pass"], false);
    assert!((v["quasi_canonical_abs_residual"].as_f64().unwrap() - 8.0).abs() < 1e-6);

    let text = wqcm(&["classify", "builtin:flat-const"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&text.stdout).contains("contact-metric"));
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["validate", "not-a-file.json"][..],
        &["validate", "builtin:no-such-structure"],
        &["validate", "builtin:scaled"],
        &["frobnicate"],
        &["validate", "builtin:flat-const", "--bogus"],
        &["check", "everything", "builtin:flat-const"],
        &["fbasis", "builtin:sasakian-r3", "--at", "1,2"],
        &["check", "all", "builtin:flat-const", "--points", "0"],
        &[],
    ] {
        let out = wqcm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let usage = wqcm(&["frobnicate"]);
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("perturbed.json");
    let mut doc: Value =
        serde_json::from_str(&wqcm::catalog::catalog("sasakian-r3").unwrap().to_json()).unwrap();
    doc["Q"] = serde_json::json!([["1.1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
    std::fs::write(&path, doc.to_string()).unwrap();
    let p = path.to_str().unwrap();

    let out = wqcm(&["validate", p, "--format", "json", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let qc = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "Q-consistency")
        .unwrap()
        .clone();
    assert_eq!(qc["verdict"], "fail");
    assert!((qc["max_abs_residual"].as_f64().unwrap() - 0.1).abs() < 1e-9);

    // loosening the algebraic tier past the defect makes it pass
    let out = wqcm(&["validate", p, "--tol-algebraic", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn seed_flag_and_environment() {
    let run = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_wqcm"));
        c.args(args).env_remove("WQCM_SEED");
        if let Some(s) = env {
            c.env("WQCM_SEED", s);
        }
        json(&c.output().unwrap())
    };
    let base = ["validate", "builtin:sasakian-r3", "--format", "json", "--points", "4"];
    assert_eq!(run(&base, None)["seed"], 7);
    assert_eq!(run(&base, Some("99"))["seed"], 99);
    let mut explicit = base.to_vec();
    explicit.extend(["--seed", "3"]);
    assert_eq!(run(&explicit, Some("99"))["seed"], 3);
}

#[test]
fn tolerance_overrides_are_independent() {
    let out = wqcm(&[
        "check", "identity", "builtin:sasakian-r3", "--format", "json", "--points", "4",
        "--tol-deriv", "1e-6", "--tol-curv", "1e-5",
    ]);
    let v = json(&out);
    assert_eq!(v["tol"]["algebraic"], 1e-10);
    assert_eq!(v["tol"]["deriv"], 1e-6);
    assert_eq!(v["tol"]["curvature"], 1e-5);
}

#[test]
fn output_flag_writes_file_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = wqcm(&[
        "check", "curvature", "builtin:sasakian-r3", "--format", "json", "--points", "4",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "curvature");
}

#[test]
fn fbasis_and_cone_commands() {
    let out = wqcm(&["fbasis", "builtin:graded?n=2,s1=1,s2=4", "--at", "0.1,-0.2,0.3,0.05,-0.4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let lambda: Vec<f64> = v["lambda"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((lambda[0] - 1.0).abs() < 1e-9 && (lambda[1] - 16.0).abs() < 1e-9, "{lambda:?}");

    let out = wqcm(&["cone", "builtin:sasakian-r5", "--t", "-0.25", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
    let gbar = v["gbar"].as_array().unwrap();
    assert_eq!(gbar[5][5].as_f64().unwrap(), 0.5f64.exp());
}

#[test]
fn list_names_every_builtin() {
    let out = wqcm(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["sasakian-r3", "scaled", "graded", "flat-const"] {
        assert!(text.contains(key), "{key}");
    }
    let v = json(&wqcm(&["list", "--format", "json"]));
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn text_report_lists_checks() {
    let out = wqcm(&["check", "theorems", "builtin:scaled?s=2", "--points", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("t33-sasakian"));
    assert!(text.contains("skipped"));
}
