use std::process::{Command, Output};

use hardy_opa::cli::{DualReport, ExtremalReport, Report, RootsReport, TruncationCommandReport};
use hardy_opa::opa::{ConjectureEntry, OpaResult};
use hardy_opa::orthogonality::PythagoreanReport;
use hardy_opa::projection::ProjectionSummary;
use hardy_opa::roots::EscapeReport;
use serde::de::DeserializeOwned;

const BIN: &str = env!("CARGO_BIN_EXE_hardy-opa");
const HALF_ZERO: &str = r#"{"blaschke":{"zeros":[{"re":0.5,"im":0}]}}"#;
const ONE_PLUS_HALF_Z: &str = r#"{"outer_poly":[{"re":1,"im":0},{"re":0.5,"im":0}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("HARDY_OPA_GRID").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn parse<T: DeserializeOwned>(out: &Output) -> Report<T> {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(out));
    serde_json::from_str(&stdout(out)).expect("report re-parses")
}

#[test]
fn project_reports_closed_form_distance() {
    let out = run(&["project", "--p", "3", "--input", HALF_ZERO]);
    let rep: Report<ProjectionSummary> = parse(&out);
    assert_eq!(rep.grid, 4096);
    assert!((rep.result.distance - 0.75f64.powf(1.0 / 3.0)).abs() < 1e-14);
    assert!(rep.result.verified);
}

#[test]
fn opa_degree_zero_for_one_plus_half_z() {
    let out = run(&["opa", "--p", "2", "--degree", "0", "--input", ONE_PLUS_HALF_Z]);
    let rep: Report<OpaResult> = parse(&out);
    assert_eq!(rep.result.coefficients.len(), 1);
    assert!((rep.result.coefficients[0].re - 0.8).abs() < 1e-12);
    assert!(rep.result.coefficients[0].im.abs() < 1e-12);
    assert!((rep.result.error.powi(2) - 0.2).abs() < 1e-12);
}

#[test]
fn extremal_for_double_zero() {
    let out = run(&["extremal-fbp", "--p", "2", "--zeros", "0.5,0.5"]);
    let rep: Report<ExtremalReport> = parse(&out);
    let e = &rep.result.extremal;
    assert!((e.c - 0.9375).abs() < 1e-12);
    assert_eq!(e.w.len(), 1);
    assert!((e.w[0].re - 0.8).abs() < 1e-10 && e.w[0].im.abs() < 1e-10);
    assert!(e.max_consistency_residual < 1e-10);
    assert!(rep.result.orthogonality < 1e-9);
}

#[test]
fn input_may_be_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, HALF_ZERO).unwrap();
    let out = run(&["distance", "--p", "2", "--input", path.to_str().unwrap()]);
    let rep: Report<hardy_opa::cli::DistanceReport> = parse(&out);
    assert!((rep.result.distance - 0.75f64.sqrt()).abs() < 1e-15);
}

#[test]
fn complex_zeros_as_json() {
    let out = run(&["extremal-fbp", "--p", "3", "--grid", "1024", "--zeros", r#"[{"re":0,"im":0.4},{"re":-0.3,"im":0.1}]"#]);
    let rep: Report<ExtremalReport> = parse(&out);
    assert_eq!(rep.result.extremal.zeros.len(), 2);
    assert!(rep.result.extremal.max_consistency_residual < 1e-9);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["project", "--p", "2", "--grid", "256", "--zeros", "0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rep: Report<ProjectionSummary> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((rep.result.distance - 0.75f64.sqrt()).abs() < 1e-15);
}

#[test]
fn grid_env_var_sets_default() {
    let out = Command::new(BIN)
        .args(["project", "--p", "2", "--zeros", "0.5"])
        .env("HARDY_OPA_GRID", "512")
        .output()
        .unwrap();
    let rep: Report<ProjectionSummary> = parse(&out);
    assert_eq!(rep.grid, 512);
    let out = Command::new(BIN)
        .args(["project", "--p", "2", "--zeros", "0.5", "--grid", "128"])
        .env("HARDY_OPA_GRID", "512")
        .output()
        .unwrap();
    assert_eq!(parse::<ProjectionSummary>(&out).grid, 128);
}

#[test]
fn every_json_report_reparses() {
    let g = r#"{"outer_poly":[{"re":0,"im":0},{"re":0.4,"im":-0.2}]}"#;
    let roots: Report<RootsReport> =
        parse(&run(&["roots", "--p", "3", "--degree", "4", "--grid", "1024", "--input", ONE_PLUS_HALF_Z]));
    assert_eq!(roots.result.roots.roots.len(), 4);
    let dual: Report<DualReport> = parse(&run(&["dual", "--q", "2", "--zeros", "0.5", "--grid", "1024"]));
    assert!((dual.result.sup.value - 0.75f64.sqrt()).abs() < 1e-3);
    let pyth: Report<PythagoreanReport> = parse(&run(&["pythag", "--p", "3", "--grid", "1024", "--g", g]));
    assert!(pyth.result.orthogonal && pyth.result.all_hold());
    let scan: Report<Vec<ConjectureEntry>> = parse(&run(&[
        "scan-conjecture",
        "--p",
        "2",
        "--grid",
        "1024",
        "--input",
        ONE_PLUS_HALF_Z,
        "--zeros",
        "0.3,-0.6",
    ]));
    assert_eq!(scan.result.len(), 2);
    let esc: Report<EscapeReport> =
        parse(&run(&["escape", "--p", "3", "--degree", "4", "--grid", "1024", "--input", ONE_PLUS_HALF_Z]));
    assert_eq!(esc.result.steps.iter().map(|s| s.degree).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    let tr: Report<TruncationCommandReport> = parse(&run(&["truncation", "--p", "2", "--n-list", "0,1,2,3"]));
    assert!(tr.result.generator.monotone);
}

fn csv_header(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    stdout(&out).lines().next().unwrap().to_string()
}

#[test]
fn csv_column_sets_are_fixed() {
    let base = ["--format", "csv", "--grid", "1024"];
    let with = |cmd: &[&str]| -> Vec<String> { cmd.iter().chain(base.iter()).map(|s| s.to_string()).collect() };
    let h = |v: Vec<String>| csv_header(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(h(with(&["opa", "--p", "2", "--degree", "2", "--input", ONE_PLUS_HALF_Z])), "k,re,im");
    assert_eq!(
        h(with(&["roots", "--p", "3", "--degree", "3", "--input", ONE_PLUS_HALF_Z])),
        "root_re,root_im,modulus,in_disk"
    );
    assert_eq!(
        h(with(&["scan-conjecture", "--p", "2", "--input", ONE_PLUS_HALF_Z, "--zeros", "0.5"])),
        "index,lhs,rhs,margin,rhs_unimodular,margin_unimodular,counterexample"
    );
    assert_eq!(h(with(&["escape", "--p", "3", "--degree", "3", "--input", ONE_PLUS_HALF_Z])), "n,p,root_re,root_im,modulus,in_disk");
    assert_eq!(h(with(&["truncation", "--p", "2"])), "n,j_at_zero_modulus,distance");
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let args = ["dual", "--q", "3", "--zeros", "0.5,-0.2", "--grid", "1024", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["opa", "--p", "3", "--degree", "5", "--grid", "1024", "--input", ONE_PLUS_HALF_Z]);
    let b = run(&["opa", "--p", "3", "--degree", "5", "--grid", "1024", "--input", ONE_PLUS_HALF_Z]);
    assert_eq!(a.stdout, b.stdout);
}

fn assert_invalid(args: &[&str]) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "args {args:?}");
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains(':'), "{err}");
}

#[test]
fn invalid_input_exits_2() {
    assert_invalid(&["opa", "--p", "1", "--input", ONE_PLUS_HALF_Z]);
    assert_invalid(&["opa", "--input", ONE_PLUS_HALF_Z]);
    assert_invalid(&["project", "--p", "2", "--input", "{not json"]);
    assert_invalid(&["project", "--p", "2", "--input", "/nonexistent/f.json"]);
    assert_invalid(&["project", "--p", "2", "--zeros", "1.5"]);
    assert_invalid(&["opa", "--p", "2", "--grid", "8", "--input", ONE_PLUS_HALF_Z]);
    assert_invalid(&["project", "--p", "2", "--zeros", "0.5", "--format", "csv"]);
    assert_invalid(&["bogus"]);
}

#[test]
fn nonconvergence_exits_3() {
    let out = run(&["opa", "--p", "3", "--degree", "6", "--max-iter", "1", "--grid", "1024", "--input", ONE_PLUS_HALF_Z]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    let rep: Report<OpaResult> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!rep.result.converged);
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("scan-conjecture"));
}
