use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn hadamard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadamard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn validate(doc: &Value, definition: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/output.schema.json");
    let full: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let schema = json!({
        "$ref": format!("#/definitions/{definition}"),
        "definitions": full["definitions"].clone(),
    });
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let errors: Vec<String> = match compiled.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(errors.is_empty(), "{definition}: {errors:#?}");
    // the top-level document schema accepts it too
    let top = jsonschema::JSONSchema::compile(&full).unwrap();
    assert!(top.is_valid(doc));
}

#[test]
fn gill_example() {
    let out = hadamard(&["bound", "--theorem", "gill", "--f", "exp(x)", "--a", "0", "--b", "1"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    validate(&doc, "bound_report");
    let e1 = std::f64::consts::E - 1.0;
    assert!((doc["quantities"]["integral_mean"].as_f64().unwrap() - e1).abs() < 1e-9);
    assert!((doc["quantities"]["rhs"].as_f64().unwrap() - e1).abs() < 1e-9);
    assert_eq!(doc["verdict"], "holds");
    assert!(!out.stderr.is_empty());
}

#[test]
fn certify_refutes_log_convexity_of_gaussian() {
    let out = hadamard(&["certify", "--class", "log_convex", "--f", "exp(-x^2)", "--a", "0", "--b", "1"]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    validate(&doc, "certificate");
    assert_eq!(doc["verdict"], "refuted");
    assert!(doc["counterexample"].is_object());
    let ok = hadamard(&["certify", "--class", "log_concave", "--f", "exp(-x^2)", "--a", "0", "--b", "1"]);
    assert_eq!(code(&ok), 0);
    validate(&stdout_json(&ok), "certificate");
}

#[test]
fn certify_inconclusive_on_domain_fault() {
    let out = hadamard(&["certify", "--class", "convex", "--f", "log(x)", "--a", "-1", "--b", "1"]);
    assert_eq!(code(&out), 2);
    let doc = stdout_json(&out);
    validate(&doc, "certificate");
    assert_eq!(doc["verdict"], "inconclusive");
    assert_eq!(doc["fault"]["fault"]["fault"], "log_of_non_positive");
}

#[test]
fn certify_m_classes_report_k_membership() {
    let out = hadamard(&["certify", "--class", "alpha_m_convex", "--alpha", "0.5", "--m", "1", "--f", "x^2-1", "--a", "0", "--b", "2"]);
    let doc = stdout_json(&out);
    validate(&doc, "certificate");
    assert_eq!(doc["f_at_zero"], -1.0);
    assert_eq!(doc["in_K_class"], json!(code(&out) == 0));
}

#[test]
fn parse_success_and_error() {
    let out = hadamard(&["parse", "--f", "2^3^2 - x"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    validate(&doc, "parse_result");
    assert_eq!(doc["pretty"], "((2^(3^2))-x)");

    let bad = hadamard(&["parse", "--f", "2*x+"]);
    assert_eq!(code(&bad), 64);
    let doc = stdout_json(&bad);
    validate(&doc, "usage_error");
    assert_eq!(doc["usage_error"]["parse_error"]["offset"], 4);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("offset 4"));
}

#[test]
fn bound_exit_paths() {
    let unmet = hadamard(&["bound", "--theorem", "classic", "--f", "-x^2", "--a", "0", "--b", "1"]);
    assert_eq!(code(&unmet), 2);
    validate(&stdout_json(&unmet), "bound_report");

    // a tolerance loose enough to "certify" a concave function exposes the violated path
    let violated = hadamard(&["bound", "--theorem", "classic", "--f", "-x^2", "--a", "0", "--b", "1", "--certify-tol", "10"]);
    assert_eq!(code(&violated), 1);
    let doc = stdout_json(&violated);
    validate(&doc, "bound_report");
    assert_eq!(doc["verdict"], "violated");
}

#[test]
fn every_theorem_produces_a_valid_report() {
    let cases: &[&[&str]] = &[
        &["--theorem", "classic", "--f", "x^2", "--a", "0", "--b", "2"],
        &["--theorem", "gill", "--f", "exp(-x^2)", "--a", "0", "--b", "1", "--log-concave"],
        &["--theorem", "cor1", "--f", "exp(x^2)", "--a", "0", "--b", "1"],
        &["--theorem", "thm21_product", "--fi", "exp(x)", "--fi", "exp(x^2)", "--a", "0", "--b", "1"],
        &["--theorem", "cor22", "--fi", "exp(x)", "--fi", "2", "--a", "0.5", "--b", "1.5"],
        &["--theorem", "thm22_sandwich", "--f", "exp(x)", "--g", "exp(x)", "--a", "0", "--b", "1"],
        &["--theorem", "thm23_sandwich", "--f", "exp(x)", "--g", "exp(2*x^2)", "--a", "0", "--b", "1"],
        &["--theorem", "thm24_mconvex", "--f", "(2-x)^2", "--g", "(2-x)^2", "--a", "0", "--b", "1", "--m1", "1", "--m2", "1"],
        &["--theorem", "thm25_alpham", "--f", "(2-x)^2", "--g", "(3-x)^4", "--a", "0", "--b", "1", "--m1", "1", "--m2", "1", "--alpha1", "1", "--alpha2", "1"],
    ];
    for case in cases {
        let mut args = vec!["bound"];
        args.extend_from_slice(case);
        let out = hadamard(&args);
        assert_eq!(code(&out), 0, "{case:?}: {}", String::from_utf8_lossy(&out.stderr));
        validate(&stdout_json(&out), "bound_report");
    }
}

#[test]
fn thm24_example_values() {
    let out = hadamard(&["bound", "--theorem", "thm24_mconvex", "--f", "(2-x)^2", "--g", "(2-x)^2", "--a", "0", "--b", "1", "--m1", "1", "--m2", "1"]);
    let doc = stdout_json(&out);
    assert!((doc["quantities"]["lhs"].as_f64().unwrap() - 6.2).abs() < 1e-10);
    assert!((doc["quantities"]["rhs"].as_f64().unwrap() - 7.0).abs() < 1e-10);
}

#[test]
fn usage_errors_exit_64() {
    let cases: &[&[&str]] = &[
        &["bound", "--theorem", "thm24_mconvex", "--f", "(2-x)^2", "--a", "0", "--b", "1"],
        &["bound", "--theorem", "thm24_mconvex", "--f", "1", "--g", "1", "--a", "0", "--b", "1", "--m1", "1"],
        &["bound", "--theorem", "thm25_alpham", "--f", "1", "--g", "1", "--a", "0", "--b", "1", "--m1", "1", "--m2", "1"],
        &["bound", "--theorem", "gill", "--f", "exp(x)", "--a", "1", "--b", "0"],
        &["bound", "--theorem", "gill", "--f", "exp(x)", "--g", "x", "--a", "0", "--b", "1"],
        &["bound", "--theorem", "thm22_sandwich", "--f", "exp(x)", "--a", "0", "--b", "1"],
        &["bound", "--theorem", "thm21_product", "--a", "0", "--b", "1"],
        &["bound", "--theorem", "thm22_sandwich", "--f", "1", "--g", "1", "--a", "0", "--b", "1", "--log-concave"],
        &["bound", "--theorem", "gill", "--f", "exp(x)", "--a", "0", "--b", "1", "--grid", "41"],
        &["bound", "--theorem", "gill", "--f", "exp(x)", "--a", "0", "--b", "1", "--quad-tol", "0.5"],
        &["bound", "--theorem", "gill", "--f", "exp(x)", "--a", "0", "--b", "1", "--opt-grid", "2"],
        &["bound", "--theorem", "nope", "--f", "exp(x)", "--a", "0", "--b", "1"],
        &["certify", "--class", "m_convex", "--f", "x", "--a", "0", "--b", "1"],
        &["certify", "--class", "m_convex", "--m", "1.5", "--f", "x", "--a", "0", "--b", "1"],
        &["certify", "--class", "convex", "--f", "2x", "--a", "0", "--b", "1"],
        &["fuzz", "--theorem", "gill", "--trials", "0"],
        &["fuzz", "--theorem", "thm24_mconvex", "--m1", "0", "--trials", "2"],
        &["frobnicate"],
    ];
    for case in cases {
        let out = hadamard(case);
        assert_eq!(code(&out), 64, "{case:?}");
        validate(&stdout_json(&out), "usage_error");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn fuzz_output_files_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let margins = dir.path().join("margins.csv");
    let args = [
        "fuzz", "--theorem", "cor22", "--trials", "25", "--seed", "17",
        "--out", summary.to_str().unwrap(), "--csv", margins.to_str().unwrap(),
    ];
    let first = hadamard(&args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let doc = stdout_json(&first);
    validate(&doc, "fuzz_summary");
    assert_eq!(doc["violations"], 0);
    assert_eq!(std::fs::read(&summary).unwrap(), first.stdout);
    let csv = std::fs::read_to_string(&margins).unwrap();
    assert_eq!(csv.lines().count(), 26);
    assert!(csv.starts_with("trial,verdict,margin"));

    let second = hadamard(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn occupancy_probe_reports_unmet() {
    let out = hadamard(&["fuzz", "--theorem", "thm24_mconvex", "--m1", "0.5", "--m2", "0.5", "--trials", "4", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    validate(&doc, "fuzz_summary");
    assert_eq!(doc["holds"], 0);
    assert_eq!(doc["hypotheses_unmet"], 4);
    assert!(doc["discarded_draws"].as_u64().unwrap() > 0);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["bound", "--theorem", "cor1", "--f", "exp(0.3*x^2-x)", "--a", "0.2", "--b", "2.4"];
    assert_eq!(hadamard(&args).stdout, hadamard(&args).stdout);
    let args = ["certify", "--class", "m_convex", "--m", "0.5", "--f", "exp(-x)", "--a", "0", "--b", "2"];
    assert_eq!(hadamard(&args).stdout, hadamard(&args).stdout);
}

#[test]
fn help_exits_zero() {
    let out = hadamard(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("fuzz"));
}

#[test]
fn leading_minus_expressions_parse() {
    let out = hadamard(&["parse", "--f", "-x^2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["pretty"], "(-(x^2))");
}
