use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use v2vbench::scenario::{moving_ppp_trace, write_trace, ScenarioConfig};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_v2vbench"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn analysis_only_distance_sweep_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--experiment", "prp-vs-distance", "--drops", "0"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = csv_lines(&dir.path().join("prp-vs-distance.csv"));
    assert_eq!(lines[0], "x,algorithm,source,value,ci_low,ci_high");
    assert_eq!(lines.len(), 1 + 2 * 24);
    assert!(lines.iter().any(|l| l.starts_with("250.000,MD,analysis,0.98787")));
    let gp = fs::read_to_string(dir.path().join("prp-vs-distance.gp")).unwrap();
    assert!(gp.contains("RR analysis") && gp.contains("MD analysis"));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("prp-vs-distance.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["config"]["radio"]["beta"], 4.0);
}

#[test]
fn simulation_output_is_deterministic() {
    let args = ["--experiment", "prp-vs-distance", "--drops", "2", "--algorithms", "rr,md", "--sweep", "100,200", "--seed", "5"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    let (la, lb) = (csv_lines(&a.path().join("prp-vs-distance.csv")), csv_lines(&b.path().join("prp-vs-distance.csv")));
    assert_eq!(la, lb);
    let sim: Vec<&String> = la.iter().filter(|l| l.contains(",simulation,")).collect();
    assert_eq!(sim.len(), 2 * 24);
    for l in sim {
        let f: Vec<f64> = l.split(',').filter_map(|v| v.parse().ok()).collect();
        assert!(f[1] >= 0.0 && f[1] <= 1.0 && f[2] <= f[1] && f[1] <= f[3], "{l}");
    }
}

#[test]
fn empty_sweep_is_a_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--experiment", "prp-vs-density", "--sweep"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("prp-vs-density.csv").exists());
}

#[test]
fn config_errors_name_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[cam]\nbeacon_frequency_hz = 10.0\nrbs = 3\n").unwrap();
    let out = run(&["--experiment", "prp-vs-R", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rbs") && err.contains("line 3"), "{err}");
}

#[test]
fn unknown_experiment_and_algorithm_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--experiment", "fig9"], dir.path()).status.code(), Some(1));
    let out = run(&["--experiment", "prp-vs-distance", "--algorithms", "rr,xyz"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn full_mode_and_d09_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--experiment", "d09-vs-density", "--drops", "0", "--mode", "full", "--sweep", "0.05,0.1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = csv_lines(&dir.path().join("d09-vs-density.csv"));
    assert_eq!(lines.len(), 5);
    let md: f64 = lines
        .iter()
        .find(|l| l.starts_with("0.100000,MD,"))
        .and_then(|l| l.split(',').nth(3))
        .unwrap()
        .parse()
        .unwrap();
    let rr: f64 = lines
        .iter()
        .find(|l| l.starts_with("0.100000,RR,"))
        .and_then(|l| l.split(',').nth(3))
        .unwrap()
        .parse()
        .unwrap();
    assert!(md > rr, "{md} vs {rr}");
    let manifest = fs::read_to_string(dir.path().join("d09-vs-density.manifest.json")).unwrap();
    assert!(manifest.contains("\"md_mode\": \"full\""), "{manifest}");
}

#[test]
fn trace_driven_run_and_exhausted_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig { density: 0.125, road_length: 8000.0, wrap: true, seed: 3 };
    let snaps = moving_ppp_trace(&cfg, 20, 0.1, 30.0, 4.0).unwrap();
    let trace = dir.path().join("trace.csv");
    write_trace(&snaps, fs::File::create(&trace).unwrap()).unwrap();

    let t = trace.to_str().unwrap();
    let out = run(&["--experiment", "prp-vs-distance", "--trace", t, "--drops", "2", "--algorithms", "rr,md"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = csv_lines(&dir.path().join("prp-vs-distance.csv"));
    assert!(lines.iter().any(|l| l.contains(",MD,simulation,")));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("prp-vs-distance.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["trace"]["snapshots"], 20);
    let rho = manifest["details"]["analysis_density"].as_f64().unwrap();
    assert!((rho - 0.125).abs() < 0.02, "{rho}");

    let out = run(&["--experiment", "prp-vs-distance", "--trace", t, "--drops", "3", "--algorithms", "rr"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));

    let out = run(&["--experiment", "prp-vs-density", "--trace", t], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn default_config_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_v2vbench")).arg("--print-default-config").output().unwrap();
    assert!(out.status.success());
    let cfg = dir.path().join("default.toml");
    fs::write(&cfg, &out.stdout).unwrap();
    let out = run(&["--experiment", "prp-vs-distance", "--drops", "0", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--experiment", "validate", "--drops", "2"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let verdicts = stdout.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).count();
    assert_eq!(verdicts, 12, "{stdout}");
    let failed = stdout.lines().filter(|l| l.starts_with("[FAIL]")).count();
    assert_eq!(out.status.code(), Some(if failed == 0 { 0 } else { 3 }));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("validate.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["checks"].as_array().unwrap().len(), 12);
}
