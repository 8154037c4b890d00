use std::path::PathBuf;

use determinacy_cli::run_with;
use serde_json::Value;

fn example(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("examples");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["determinacy"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn temp_config(text: &str) -> tempfile::NamedTempFile {
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), text).unwrap();
    file
}

#[test]
fn beta_table_prints_the_value() {
    assert_eq!(run(&["beta-table", "--alpha", "1", "--mu", "3"]), (0, "1\n".into()));
    let (code, out) = run(&["beta-table", "--alpha", "1", "--mu", "1.5"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1.333333\n");
    let (code, out) = run(&["beta-table", "--alpha", "0.5", "--mu", "0.5", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["beta"], 1.0);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["beta-table", "--alpha", "-1", "--mu", "3"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["analyze"]).0, 1);
    assert_eq!(run(&["analyze", "--config", "/nonexistent/config.json"]).0, 1);
    let bad = temp_config(r#"{ "variables": ["x"], "f": "x^2", "colour": "red" }"#);
    assert_eq!(run(&["fitting", "--config", bad.path().to_str().unwrap()]).0, 1);
    let not_at_origin = temp_config(r#"{ "variables": ["x"], "f": "x^2 + 1" }"#);
    assert_eq!(run(&["fitting", "--config", not_at_origin.path().to_str().unwrap()]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn primitive_check_reports_the_witness() {
    let (code, out) = run(&["primitive-check", "--config", &example("bad.json")]);
    assert_eq!(code, 2);
    assert!(out.contains("df/dx1"), "{out}");
    let (code, out) = run(&["primitive-check", "--config", &example("example25.json"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["primitive"], true);
}

#[test]
fn analyze_failure_still_emits_the_checks() {
    let (code, out) = run(&["analyze", "--config", &example("bad.json")]);
    assert_eq!(code, 2);
    assert!(out.contains("[FAIL]"), "{out}");
    assert!(out.contains("[pass] f(0) = 0"), "{out}");
}

#[test]
fn fitting_lists_the_basis_and_writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kf.json");
    let (code, out) =
        run(&["fitting", "--config", &example("example25.json"), "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let basis: Vec<&str> = v["basis"].as_array().unwrap().iter().map(|b| b.as_str().unwrap()).collect();
    assert_eq!(basis, ["x1*x2^4 + x1^3", "x2^7 + x1^2*x2^3"]);
    assert_eq!(v["relations"].as_array().unwrap().len(), 1);
}

#[test]
fn sequence_commands() {
    let cfg = temp_config(
        r#"{ "variables": ["x1"], "f": "x1^2",
             "sequence": { "family": "gevrey_log", "alpha": 1.0, "beta": 0.0 },
             "theta": { "c": 1.0, "mu": 2.0, "nu": 0.0 } }"#,
    );
    let path = cfg.path().to_str().unwrap();
    let (code, out) = run(&["check-tame", "--config", path]);
    assert_eq!(code, 0);
    assert!(out.contains("tame"), "{out}");
    let (code, out) = run(&["check-nonqa", "--config", path, "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "non_quasianalytic");
    let (code, out) = run(&["htheta", "--config", path]);
    assert_eq!(code, 0);
    assert!(out.contains("GevreyLog(alpha = 2, beta = 0)"), "{out}");

    let qa = temp_config(
        r#"{ "variables": ["x1"], "f": "x1^2", "sequence": { "family": "gevrey_log", "alpha": 0.0, "beta": 0.0 } }"#,
    );
    assert_eq!(run(&["check-nonqa", "--config", qa.path().to_str().unwrap()]).0, 2);
    let no_sequence = temp_config(r#"{ "variables": ["x1"], "f": "x1^2" }"#);
    assert_eq!(run(&["check-tame", "--config", no_sequence.path().to_str().unwrap()]).0, 1);
}

#[test]
fn loja_fit_writes_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("samples.csv");
    let (code, out) = run(&["loja-fit", "--config", &example("example25.json"), "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("s_hat = 1.33"), "{out}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("log_r,log_d,is_envelope"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 1000);
    assert!(rows.iter().any(|r| r.ends_with(",true")));
}

#[test]
fn analyze_cone_example_matches_the_stored_report() {
    let (code, out) = run(&["analyze", "--config", &example("example26.json"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exponent"]["rational"], "4/3");
    assert!((v["target"]["alpha"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["target"]["beta"], 0.0);
    assert!(v["verification"]["ok"].as_bool().unwrap());
    assert_eq!(out, std::fs::read_to_string(example("example26.report.json")).unwrap());
}
