use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emsource"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn emsource")
}

fn small_config(sources: &str) -> String {
    format!(
        r#"{{
  "surface": {{"radius": 5, "n_phi": 40, "n_theta": 40}},
  "grid": {{"box": [[-1, -1, -1], [1, 1, 1]], "n": [41, 41, 41]}},
  "noise": {{"delta1": 0.01, "delta2": 0.01, "seed": 3}},
  "sources": {sources},
  "output": {{"dir": "out", "name": "small"}}
}}"#
    )
}

const ONE_SOURCE: &str = r#"[{"location": [0.2, -0.1, 0.3], "moment": {"re": [1, -2, 0.5], "im": [0, 1, -1]}}]"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn selfcheck_passes() {
    let out = run(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("coincidence"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn invalid_config_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"surface": {"radius": -2}}"#);
    let out = run(&["simulate", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("surface.radius"));

    let outside = write(dir.path(), "outside.json", &small_config(r#"[{"location": [6, 0, 0], "moment": {"re": [1, 0, 0]}}]"#));
    assert_eq!(run(&["simulate", s(&outside)]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_validation_code() {
    assert_eq!(run(&["simulate"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn missing_files_are_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", s(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &small_config(ONE_SOURCE));
    let first = run(&["simulate", s(&cfg)]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let csv = dir.path().join("out/small.csv");
    let meta = dir.path().join("out/small.json");
    let a = (std::fs::read(&csv).unwrap(), std::fs::read(&meta).unwrap());
    assert_eq!(a.0.iter().filter(|&&b| b == b'\n').count(), 40 * 40 + 1);
    let stdout = String::from_utf8(first.stdout).unwrap();
    let sha: Value = serde_json::from_slice(&a.1).unwrap();
    assert!(stdout.contains(sha["csv_sha256"].as_str().unwrap()));

    assert_eq!(run(&["simulate", s(&cfg)]).status.code(), Some(0));
    assert_eq!(a, (std::fs::read(&csv).unwrap(), std::fs::read(&meta).unwrap()));

    assert_eq!(run(&["--seed", "4", "simulate", s(&cfg)]).status.code(), Some(0));
    assert_ne!(a.0, std::fs::read(&csv).unwrap());
}

#[test]
fn default_surface_gives_ten_thousand_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t1.json",
        r#"{"sources": [{"location": [1.1, -0.3, -1.0], "moment": {"re": [0, 0, 5]}}], "output": {"name": "t1"}}"#,
    );
    let out = run(&["simulate", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/t1.csv")).unwrap();
    assert_eq!(text.lines().count(), 10_001);
}

#[test]
fn reconstruct_writes_result_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &small_config(ONE_SOURCE));
    assert_eq!(run(&["simulate", s(&cfg)]).status.code(), Some(0));
    let data = dir.path().join("out/small.json");
    let out = run(&["--threads", "1", "reconstruct", s(&cfg), s(&data)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("1 sources recovered"), "{stdout}");

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/small.result.json")).unwrap()).unwrap();
    let src = &doc["reconstruction"]["sources"][0];
    let loc: Vec<f64> = src["location"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (a, b) in loc.iter().zip([0.2, -0.1, 0.3]) {
        assert!((a - b).abs() <= 0.05 + 1e-12, "{loc:?}");
    }
    assert!(doc["errors"]["matches"][0]["moment_relative_error"].as_f64().unwrap() < 0.1);
    assert_eq!(doc["stats"]["threads"], 1);
    assert!(doc["data"]["csv_sha256"].is_string());
    let table = std::fs::read_to_string(dir.path().join("out/small.table.txt")).unwrap();
    assert_eq!(table, stdout.lines().take_while(|l| !l.starts_with("wrote")).map(|l| format!("{l}\n")).collect::<String>());
}

#[test]
fn empty_sources_give_empty_result() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &small_config("[]"));
    assert_eq!(run(&["simulate", s(&cfg)]).status.code(), Some(0));
    let out = run(&["reconstruct", s(&cfg), s(&dir.path().join("out/small.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/small.result.json")).unwrap()).unwrap();
    assert_eq!(doc["reconstruction"]["sources"].as_array().unwrap().len(), 0);
}

#[test]
fn mismatched_data_is_rejected_before_computation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &small_config(ONE_SOURCE));
    assert_eq!(run(&["simulate", s(&cfg)]).status.code(), Some(0));
    let other = write(dir.path(), "k.json", &small_config(ONE_SOURCE).replacen('{', r#"{"wave": {"k": 15}, "#, 1));
    let out = run(&["reconstruct", s(&other), s(&dir.path().join("out/small.json"))]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wavenumber"));
    assert!(!dir.path().join("out/small.result.json").exists());
}

#[test]
fn field_exports_plane_and_volume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &small_config(ONE_SOURCE));
    assert_eq!(run(&["simulate", s(&cfg)]).status.code(), Some(0));
    let data = dir.path().join("out/small.json");
    let out = run(&["field", s(&cfg), s(&data), "--plane", "z=0.3", "--volume", "--normalize"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/small.modulus.z0.300.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41 * 41 + 1);
    let max = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!((max - 1.0).abs() < 1e-12);
    let vtk = std::fs::read_to_string(dir.path().join("out/small.modulus.vtk")).unwrap();
    assert!(vtk.contains("DIMENSIONS 41 41 41"));

    let outside = run(&["field", s(&cfg), s(&data), "--plane", "z=3"]);
    assert_eq!(outside.status.code(), Some(1));
    assert_eq!(run(&["field", s(&cfg), s(&data)]).status.code(), Some(1));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            emsource::io::parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 3);
}
