use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kpilab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpilab"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL_BLOWUP: &str = r#"
[grid]
nx = 32
ny = 32
lx = 8.0
ly = 8.0

[solver]
dt = 1e-2
T = 0.1
record_every = 2
"#;

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL_BLOWUP).unwrap();
    let o = kpilab(&["run", "blowup-bound", "--config", "c.toml", "--out", "runs"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run_dir = dir.path().join("runs/blowup_bound");
    for f in ["run.json", "series.csv", "DONE", "fields/0000.bin"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
    let r = kpilab(&["report", "runs/blowup_bound"], dir.path());
    assert_eq!(r.status.code(), Some(0));
    let text = stdout(&r);
    assert!(text.contains("experiment: blowup_bound"), "{text}");
    assert!(text.contains("c_fit"), "{text}");
}

#[test]
fn second_run_gets_new_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL_BLOWUP).unwrap();
    for _ in 0..2 {
        let o = kpilab(&["run", "blowup_bound", "--config", "c.toml"], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let a = fs::read(dir.path().join("runs/blowup_bound/series.csv")).unwrap();
    let b = fs::read(dir.path().join("runs/blowup_bound-1/series.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_refuses_incomplete_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("half")).unwrap();
    let o = kpilab(&["report", "half"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("incomplete run"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "L = 1\n").unwrap();
    let o = kpilab(&["run", "gain", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("L ≥ 2 required"));
}

#[test]
fn config_prints_resolved_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = kpilab(&["config", "gain"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("name = \"gain\"") && text.contains("[gain.control]"), "{text}");
}

#[test]
fn validate_weight_prints_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = kpilab(&["validate-weight", "--sigma", "1", "--i", "2", "--k", "1", "--nx", "512"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["c1"].as_f64().unwrap() > 0.0);
    assert!(v["c3"].as_f64().unwrap() > 0.0);
    let o = kpilab(&["validate-weight", "--sigma", "0", "--i", "0", "--k", "0", "--antiderivative"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = kpilab(&["run", "kdv"], dir.path());
    assert!(!o.status.success());
}
