use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldreg")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn classify_reports_the_case() {
    let v: Value = serde_json::from_str(&stdout(&["--scenario", "vi-basic", "classify"])).unwrap();
    assert_eq!(v["case"], "C");
    assert_eq!(v["class"], "visible-invisible");
    assert_eq!(v["gamma"], 0.5);
}

#[test]
fn curves_csv_is_deterministic() {
    let args = ["--scenario", "vi-basic", "curves", "--format", "csv"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("epsilon,alpha_D_minus,alpha_D_plus,alpha_H,alpha_C"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!((r[4] / r[0] - 1.215_537_243_668_512).abs() < 1e-9);
        assert!(r[1] < 0.0 && r[2] > 0.0);
    }
}

#[test]
fn curves_respects_repeated_epsilon() {
    let a = stdout(&["curves", "--format", "csv", "--epsilon", "0.002", "--epsilon", "0.004"]);
    assert_eq!(a.lines().count(), 3);
    // no Canard curve for the invisible family
    assert!(a.lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn melnikov_rows_per_delta() {
    let out = stdout(&["melnikov", "--format", "csv", "--delta", "1.5", "--delta", "2", "--n", "10"]);
    assert_eq!(out.lines().count(), 21);
    let v: Value = serde_json::from_str(&stdout(&["--phi", "quintic", "melnikov"])).unwrap();
    assert_eq!(v["criticality"], "subcritical");
    assert!((v["saddle_node"]["delta_S"].as_f64().unwrap() - 1.97017).abs() < 1e-4);
}

#[test]
fn canard_summary() {
    let v: Value = serde_json::from_str(&stdout(&["--scenario", "bfield", "canard", "--epsilon", "0.001"])).unwrap();
    assert!((v["delta_C_closed"].as_f64().unwrap() + 2.1679).abs() < 1e-3);
    assert_eq!(v["delta_C_numeric"].as_array().unwrap().len(), 1);
    let e = run(&["canard"]);
    assert!(!e.status.success());
    assert!(String::from_utf8_lossy(&e.stderr).starts_with("DomainError"));
}

#[test]
fn sweep_is_ordered_and_handles_empty_ranges() {
    assert_eq!(stdout(&["sweep", "--alpha-min", "0", "--alpha-max", "1", "--n", "0"]), "alpha,kind,orbits,stabilities\n");
    let out = stdout(&["sweep", "--alpha-min", "-0.02", "--alpha-max", "0.02", "--n", "5", "--epsilon", "0.006"]);
    let alphas: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(alphas.len(), 5);
    assert!(alphas.windows(2).all(|w| w[0] < w[1]));
    assert!(out.lines().nth(1).unwrap().contains("stable-focus"));
}

#[test]
fn manifold_and_simulate_csv() {
    let m = stdout(&["--scenario", "vi-basic", "manifold", "--n", "11"]);
    assert!(m.starts_with("x,m0,stability\n"));
    assert!(m.contains("attracting") && m.contains("repelling"));
    let s = stdout(&["simulate", "--x0", "0.1", "--v0", "0", "--t-end", "5", "--alpha", "0.01", "--epsilon", "0.01"]);
    assert!(s.starts_with("t,x,v\n"));
    let last = s.lines().last().unwrap();
    assert!(last.starts_with('5'));
}

#[test]
fn portrait_is_svg() {
    let s = stdout(&["portrait", "--grid", "2", "--alpha", "0.01", "--epsilon", "0.006"]);
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    assert!(s.contains("<polyline"));
}

#[test]
fn reproduce_exit_code() {
    let o = run(&["reproduce", "--example", "4.9"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with("PASS")));
    assert_eq!(run(&["reproduce", "--example", "7.7"]).status.code(), Some(2));
}

#[test]
fn errors_go_to_stderr() {
    let o = run(&["--scenario", "nowhere", "classify"]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown scenario"));
    let o = run(&["classify", "--format", "svg"]);
    assert!(!o.status.success());
}

#[test]
fn json_scenario_file_and_output_directory() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../foldreg/tests/data/vi_custom.json");
    let dir = std::env::temp_dir().join(format!("foldreg-cli-{}", std::process::id()));
    let o = run(&["--scenario", path, "--out", dir.to_str().unwrap(), "curves"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("curves.json")).unwrap()).unwrap();
    assert_eq!(v["scenario"], "vi-custom");
    assert!((v["delta_h"].as_f64().unwrap() - 11.0 / 9.0).abs() < 1e-12);
    assert!(dir.join("curves.csv").exists());
    std::fs::remove_dir_all(dir).unwrap();
}
