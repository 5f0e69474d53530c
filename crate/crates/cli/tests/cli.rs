use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bellkit_cli::config::OptimizationReport;
use bellkit_cli::verify::VerificationReport;
use bellkit_core::formats::{parse, read_settings, to_document};
use bellkit_core::polytope::DimensionReport;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn bellkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellkit"))
        .args(args)
        .output()
        .unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = bellkit(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field(stdout: &str, key: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("{key} missing from {stdout}"))
}

fn p(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn bounds_of_fixtures() {
    let out = run_ok(&["bounds", &p("inequality_i.json")]);
    assert_eq!(out, "lower -6\nupper 0\n");
    let out = run_ok(&["bounds", &p("equality_e.json")]);
    assert_eq!(out, "lower 0\nupper 1\n");
    let out = run_ok(&["bounds", &p("equality_e.json"), "--gamma"]);
    assert_eq!(out.lines().count(), 2 + 81);
    assert!(out.contains("γ0000 1\n"));
}

#[test]
fn bounds_of_empty_expression() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(
        &path,
        r#"{"format_version":"1","scenario":{"alice":[2,2],"bob":[3,3]},"terms":[]}"#,
    )
    .unwrap();
    assert_eq!(
        run_ok(&["bounds", path.to_str().unwrap()]),
        "lower 0\nupper 0\n"
    );
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(
        bellkit(&["bounds", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        bellkit(&["bounds", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(bellkit(&["rank", "2,2,3"]).status.code(), Some(2));
    assert_eq!(bellkit(&["rank", "1,2,2,2"]).status.code(), Some(2));
    assert_eq!(bellkit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn eval_values() {
    let out = run_ok(&[
        "eval",
        &p("inequality_i.json"),
        &p("settings_inequality.json"),
    ]);
    assert!((field(&out, "quantum_value") - 0.91485).abs() < 1e-5);
    let out = run_ok(&[
        "eval",
        &p("equality_e_complement.json"),
        &p("settings_equality.json"),
        "--noise",
        "0.50203",
    ]);
    assert!((field(&out, "noisy_value") - 0.14895).abs() < 1e-4);
    let out = run_ok(&[
        "eval",
        &p("equality_e.json"),
        &p("settings_equality.json"),
        "--noise",
        "1",
        "--full-precision",
    ]);
    assert!((field(&out, "noisy_value") - 5.0 / 9.0).abs() < 1e-15);
}

#[test]
fn eval_dimension_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qubit.json");
    std::fs::write(
        &path,
        r#"{"format_version":"1","dimension":2,"C":[[[1,0],[0,0]],[[0,0],[0,0]]],"alpha":[0,0],"beta":[0,0]}"#,
    )
    .unwrap();
    let out = bellkit(&["eval", &p("inequality_i.json"), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_modes() {
    let out = run_ok(&[
        "tolerance",
        &p("inequality_i.json"),
        &p("settings_inequality.json"),
        "--mode",
        "inequality",
    ]);
    assert!((field(&out, "tolerance") - 0.31386).abs() < 1e-4);
    let out = run_ok(&[
        "tolerance",
        &p("equality_e.json"),
        &p("settings_equality.json"),
        "--mode",
        "equality-pinned",
        "--complement",
        &p("equality_e_complement.json"),
    ]);
    assert!((field(&out, "tolerance") - 0.50203).abs() < 1e-4);
    let out = run_ok(&[
        "tolerance",
        &p("equality_e_complement.json"),
        &p("settings_equality.json"),
        "--mode",
        "equality-strict",
    ]);
    assert!((field(&out, "tolerance") - 0.25102).abs() < 1e-4);
}

#[test]
fn tolerance_errors() {
    let missing = bellkit(&[
        "tolerance",
        &p("equality_e.json"),
        &p("settings_equality.json"),
        "--mode",
        "equality-pinned",
    ]);
    assert_eq!(missing.status.code(), Some(2));
    let wrong_pair = bellkit(&[
        "tolerance",
        &p("equality_e.json"),
        &p("settings_equality.json"),
        "--mode",
        "equality-pinned",
        "--complement",
        &p("inequality_i.json"),
    ]);
    assert_eq!(wrong_pair.status.code(), Some(2));
    // At these settings E is positive, so the strict reading has nothing to remove.
    let positive = bellkit(&[
        "tolerance",
        &p("equality_e.json"),
        &p("settings_equality.json"),
        "--mode",
        "equality-strict",
    ]);
    assert_eq!(positive.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let product = dir.path().join("product.json");
    std::fs::write(
        &product,
        r#"{"format_version":"1","dimension":3,"C":[[[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],
            "alpha":[0,0.5],"beta":[0.25,-0.25]}"#,
    )
    .unwrap();
    let inside = bellkit(&[
        "tolerance",
        &p("inequality_i.json"),
        product.to_str().unwrap(),
        "--mode",
        "inequality",
    ]);
    assert_eq!(
        inside.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&inside.stdout)
    );
}

#[test]
fn rank_reports() {
    let out = run_ok(&["rank", "3,3,3,3"]);
    assert_eq!(field(&out, "closed_form_count"), 25.0);
    assert_eq!(field(&out, "literature_count"), 24.0);
    assert_eq!(field(&out, "numeric_affine_dimension"), 24.0);
    let out = run_ok(&["rank", "2,2,3,3"]);
    assert_eq!(field(&out, "closed_form_count"), 15.0);
    assert_eq!(field(&out, "literature_count"), 14.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rank.json");
    let out = run_ok(&["rank", "2,2,2,2", "--output", path.to_str().unwrap()]);
    assert_eq!(field(&out, "numeric_affine_dimension"), 8.0);
    let text = std::fs::read_to_string(&path).unwrap();
    let back: DimensionReport = parse(&text).unwrap();
    assert_eq!(back.formula_count, 9);
    assert_eq!(to_document(&back).unwrap(), text);
}

fn write_config(dir: &Path, objective: &str, restarts: usize, max_iterations: usize) -> PathBuf {
    let path = dir.join(format!("{objective}-{restarts}-{max_iterations}.json"));
    let text = format!(
        r#"{{"format_version":"1","objective":"{objective}",
            "free":{{"state":true,"alpha":true,"beta":true}},
            "restarts":{restarts},"max_iterations":{max_iterations},"seed":1}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn optimize_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "violation", 20, 4000);
    let settings = dir.path().join("best.json");
    let report = dir.path().join("report.json");
    let out = run_ok(&[
        "optimize",
        &p("inequality_i.json"),
        config.to_str().unwrap(),
        "--seed",
        "1",
        "--parallel",
        "--output",
        settings.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(field(&out, "best_objective") >= 0.9148);

    // The written settings reproduce the reported value.
    let again = run_ok(&[
        "eval",
        &p("inequality_i.json"),
        settings.to_str().unwrap(),
        "--full-precision",
    ]);
    let text = std::fs::read_to_string(&report).unwrap();
    let doc: OptimizationReport = parse(&text).unwrap();
    assert!((field(&again, "quantum_value") - doc.best_objective).abs() < 1e-9);
    assert_eq!(to_document(&doc).unwrap(), text);
    assert!(read_settings(&settings).is_ok());
}

#[test]
fn optimize_equality_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tolerance", 50, 4000);
    let settings = dir.path().join("best.json");
    let out = run_ok(&[
        "optimize",
        &p("equality_e.json"),
        config.to_str().unwrap(),
        "--complement",
        &p("equality_e_complement.json"),
        "--parallel",
        "--output",
        settings.to_str().unwrap(),
    ]);
    assert!(field(&out, "best_objective") >= 0.502);
}

#[test]
fn refine_with_zero_iterations_returns_start() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "violation", 1, 0);
    let settings = dir.path().join("best.json");
    let out = run_ok(&[
        "optimize",
        &p("inequality_i.json"),
        config.to_str().unwrap(),
        "--start",
        &p("settings_inequality.json"),
        "--output",
        settings.to_str().unwrap(),
    ]);
    assert!((field(&out, "best_objective") - 0.91485).abs() < 1e-5);
    assert_eq!(field(&out, "iterations_used"), 0.0);
}

#[test]
fn optimize_without_violation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let expr = dir.path().join("zero.json");
    std::fs::write(
        &expr,
        r#"{"format_version":"1","scenario":{"alice":[3,3],"bob":[3,3]},"terms":[]}"#,
    )
    .unwrap();
    let config = write_config(dir.path(), "tolerance", 2, 50);
    let settings = dir.path().join("best.json");
    let out = bellkit(&[
        "optimize",
        expr.to_str().unwrap(),
        config.to_str().unwrap(),
        "--output",
        settings.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_writes_round_tripping_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verification_report.json");
    let out = run_ok(&["verify", "--output", path.to_str().unwrap()]);
    assert!(out.contains("[INFO]"));
    let text = std::fs::read_to_string(&path).unwrap();
    let report: VerificationReport = parse(&text).unwrap();
    assert!(report.pass);
    assert!(report.scored().count() >= 12);
    assert!(report.informational().count() >= 2);
    assert_eq!(to_document(&report).unwrap(), text);
}

#[test]
fn verify_with_fixture_directory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let fixtures = fixture("");
    run_ok(&[
        "verify",
        "--fixtures",
        fixtures.to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
    ]);
    let missing = bellkit(&[
        "verify",
        "--fixtures",
        dir.path().to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}
