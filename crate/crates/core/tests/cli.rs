use std::io::Write;
use std::process::{Command, Output};

use hardy_core::cli::CSV_COLUMNS;
use hardy_core::verifier::HardyReport;

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn area_and_tau_print_scalars() {
    let out = hardy(&["area", "--d", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let area: f64 = stdout(&out).trim().parse().unwrap();
    assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-13);

    let out = hardy(&["tau", "--d", "3", "--p", "1.25", "--weight", "constant:1"]);
    assert_eq!(out.status.code(), Some(0));
    let tau: f64 = stdout(&out).trim().parse().unwrap();
    assert!((tau - 0.25).abs() < 1e-14);
}

#[test]
fn verify_json_round_trips() {
    let out = hardy(&[
        "verify", "--d", "4", "--p", "2", "--weight", "cap:2,1", "--theorem", "main", "--radial", "power_cutoff:0.05",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let first = if value.is_array() { value[0].clone() } else { value };
    let report: HardyReport = serde_json::from_value(first).unwrap();
    assert!(report.holds && report.gap >= 0.0);
    assert_eq!(report.d, 4);
}

#[test]
fn report_csv_has_the_documented_header_and_is_deterministic() {
    let args = ["report", "--d", "4", "--p", "2", "--weight", "polar_power:0.5,0.4"];
    let a = hardy(&args);
    let b = hardy(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, CSV_COLUMNS);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == CSV_COLUMNS.len() && &r[15] == "true"));
}

#[test]
fn output_file_and_tabulated_weight_file() {
    let dir = tempfile::tempdir().unwrap();
    let weight = dir.path().join("weight.json");
    let mut f = std::fs::File::create(&weight).unwrap();
    write!(f, r#"{{"type": "tabulated", "angles": [0.5, 1.5, 2.5], "values": [2.0, 1.0, 0.0]}}"#).unwrap();
    let spec = format!("tabulated:@{}", weight.display());
    let target = dir.path().join("norm.txt");
    let out = hardy(&["norm", "--d", "3", "--p", "2", "--weight", &spec, "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let norm: f64 = std::fs::read_to_string(&target).unwrap().trim().parse().unwrap();
    assert!(norm > 0.0 && norm.is_finite());
}

#[test]
fn exit_codes() {
    assert_eq!(hardy(&["tau", "--d", "3", "--p", "1.1", "--weight", "constant:1"]).status.code(), Some(2));
    assert_eq!(hardy(&["norm", "--d", "3", "--p", "2", "--weight", "cap:1,x"]).status.code(), Some(2));
    assert_eq!(hardy(&["area", "--d", "1"]).status.code(), Some(2));
    assert_eq!(hardy(&["bogus"]).status.code(), Some(2));
    let missing = hardy(&["norm", "--d", "3", "--p", "2", "--weight", "tabulated:@/nonexistent/w.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let failed = hardy(&["verify", "--d", "3", "--p", "2", "--weight", "constant:1", "--radial", "power_cutoff:0.01", "--tau-scale", "1.1"]);
    assert_eq!(failed.status.code(), Some(3));
    let stuck = hardy(&["eig", "--d", "3", "--weight", "cap:1,0.01", "--degree", "2", "--max-degree", "4", "--tol", "1e-14"]);
    assert_eq!(stuck.status.code(), Some(4));
}
