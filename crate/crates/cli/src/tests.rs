//! End-to-end runs of the subcommands against the shipped model files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::commands::parse_workers;
use crate::{run, Cli, CliResult};

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name).to_string_lossy().into_owned()
}

fn qproj(args: &[&str]) -> CliResult<()> {
    let cli = Cli::try_parse_from(std::iter::once("qproj").chain(args.iter().copied())).expect("valid flags");
    run(cli)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn exit_code(r: CliResult<()>) -> i32 {
    r.err().map_or(0, |e| e.exit_code())
}

#[test]
fn gap_writes_csv_for_snapped_quartic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gap.csv");
    qproj(&["gap", "--model", &model("quartic.json"), "--out", path(&out)]).unwrap();
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("Delta,zero_multiplicity,zero_tolerance"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let delta: f64 = row[0].parse().unwrap();
    assert!((delta - 3.256461062679751).abs() < 1e-9);
    assert_eq!(row[1], "1");
}

#[test]
fn gap_json_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gap.json");
    qproj(&["gap", "--model", &model("number.json"), "--out", path(&out)]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["gap"]["Delta"], 1.0);
    assert_eq!(v["gap"]["zero_multiplicity"], 1);
}

#[test]
fn bound_sweep_rows_respect_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    qproj(&["bound-sweep", "--model", &model("quartic.json"), "--L", "10,100,1000,10000", "--out", path(&out)]).unwrap();
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,Delta,measured_norm,bound,saturation_ratio,route_discrepancy"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!(r[2] <= r[3], "{r:?}");
    }
}

#[test]
fn spectrum_has_tolerance_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    qproj(&["spectrum", "--model", &model("mixed.json"), "--count", "3", "--out", path(&out)]).unwrap();
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("index,eigenvalue,tolerance\n"));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(exit_code(qproj(&["spectrum", "--model", &model("number.json"), "--count", "0"])), 2);
}

#[test]
fn projector_summary_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("summary.json");
    let matrix = dir.path().join("f.csv");
    qproj(&[
        "projector",
        "--model",
        &model("number.json"),
        "--scheme",
        "haar",
        "--nodes",
        "16",
        "--group-route",
        "--matrix-out",
        path(&matrix),
        "--out",
        path(&out),
    ])
    .unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["diagnostics"]["distance_to_exact"].as_f64().unwrap() < 1e-13);
    assert!(v["group_route_discrepancy"].as_f64().unwrap() < 1e-12);
    assert_eq!(fs::read_to_string(matrix).unwrap().lines().count(), 1 + 16 * 16);
}

#[test]
fn kernel_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    qproj(&["kernel", "--points", &model("reduced_kernel.json"), "--out", path(&out)]).unwrap();
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("a_p,a_q,a_t,b_p,b_q,b_t,re,im,est_error,method,converged\n"));
    let coincident: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert!((coincident[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    let out = dir.path().join("p.csv");
    qproj(&["kernel", "--points", &model("propagator.json"), "--out", path(&out)]).unwrap();
    assert!(fs::read_to_string(out).unwrap().starts_with("q2,q1,dt,re,im,est_error"));
}

#[test]
fn schema_violation_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"kind\": \"quartic\",\n  \"dimm\": 64\n}\n").unwrap();
    let err = qproj(&["gap", "--model", path(&bad)]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("bad.json:3:3"), "{err}");
}

#[test]
fn unsnapped_constant_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("c.json");
    fs::write(&m, r#"{"kind": "quartic", "dim": 32, "c": 1.0}"#).unwrap();
    let err = qproj(&["gap", "--model", path(&m)]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("snap"));
}

#[test]
fn non_convergence_exits_3_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("summary.json");
    let err = qproj(&[
        "projector",
        "--model",
        &model("number.json"),
        "--scheme",
        "sinc",
        "--tolerance",
        "1e-12",
        "--out",
        path(&out),
    ])
    .unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("tail_bound"));
    assert!(out.exists());
}

#[test]
fn missing_file_exits_1() {
    assert_eq!(exit_code(qproj(&["gap", "--model", "/nonexistent/model.json"])), 1);
}

#[test]
fn worker_count_parsing() {
    assert_eq!(parse_workers(" 4 ").unwrap(), 4);
    for bad in ["0", "-1", "many", ""] {
        assert_eq!(parse_workers(bad).unwrap_err().exit_code(), 2, "{bad:?}");
    }
}

#[test]
fn suites_pass_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["gap", "elevation"] {
        let a = dir.path().join(format!("{suite}-a.json"));
        let b = dir.path().join(format!("{suite}-b.json"));
        qproj(&["verify", "--suite", suite, "--out", path(&a)]).unwrap();
        qproj(&["verify", "--suite", suite, "--out", path(&b)]).unwrap();
        let text = fs::read(&a).unwrap();
        assert_eq!(text, fs::read(&b).unwrap());
        let v: serde_json::Value = serde_json::from_slice(&text).unwrap();
        assert_eq!(v["seed"], 1729);
        assert_eq!(v["passed"], true);
    }
}
