use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn grainy(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grainy"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

#[test]
fn entropy_run_writes_series_estimate_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainy(dir.path(), &["entropy", "--map", "baker", "--grid", "16x16", "--depth", "8", "--samples", "200000", "--seed", "7", "--label", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!(line.starts_with("h_KS=0.6"), "{line}");
    assert!(line.contains("satisfied=true"));
    assert_eq!(files(dir.path()), ["run.csv", "run.dat", "run.json"]);
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,H,bound,increment"));
    assert_eq!(csv.lines().count(), 10);
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["map"], "baker");
    assert_eq!(json["config"]["grid"], "16x16");
    assert_eq!(json["result"]["estimate"]["method"], "increment-average");
}

#[test]
fn timestamped_names_without_label() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainy(dir.path(), &["lyapunov", "--map", "cat", "--steps", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let names = files(dir.path());
    assert_eq!(names.len(), 2);
    assert!(names.iter().all(|n| n.starts_with("lyapunov-")));
    let lambda: f64 = stdout(&o).trim().trim_start_matches("lambda_max=").parse().unwrap();
    assert!((lambda - 0.9624).abs() < 0.01);
}

#[test]
fn rotation_bound_is_flagged_non_chaotic() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainy(dir.path(), &["bound", "--map", "rotation:alpha=0.618", "--grid", "8x8", "--depth", "60", "--samples", "200000", "--label", "b"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!(line.contains("non-chaotic") && line.contains("satisfied=true"), "{line}");
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(json["result"]["bound"]["chaotic"], false);
    assert!(json["result"]["bound"]["log_timescale"].is_null());
}

#[test]
fn wigner_check_reports_all_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainy(dir.path(), &["wigner-check", "--dim", "31", "--ensemble", "20", "--seed", "1", "--label", "w"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass=true"), "{}", stdout(&o));
    assert_eq!(files(dir.path()), ["w-wigner.csv", "w.csv", "w.json"]);
    let grid = std::fs::read_to_string(dir.path().join("w-wigner.csv")).unwrap();
    assert_eq!(grid.lines().next(), Some("q_index,p_index,value"));
    assert_eq!(grid.lines().count(), 31 * 31 + 1);
}

#[test]
fn remaining_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["correlation", "--map", "cat", "--grid", "16x16", "--t-max", "20", "--samples", "100000", "--label", "c"],
        &["invariant-density", "--map", "doubling", "--grid", "16x1", "--lattice", "16", "--label", "d"],
        &["factorization", "--map", "baker", "--grid", "16x16", "--t-gap", "6", "--samples", "100000", "--label", "f"],
        &["quantum-mixing", "--dim", "31", "--t-max", "40", "--label", "q"],
    ];
    for args in runs {
        let o = grainy(dir.path(), args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let headers = [("c.csv", "t,C"), ("d.csv", "row,col,value"), ("f.csv", "t_gap,residual"), ("q.csv", "t,C")];
    for (name, header) in headers {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{name}");
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["entropy", "--grid", "0x4"][..],
        &["entropy", "--map", "tent"],
        &["entropy", "--samples", "0"],
        &["wigner-check", "--dim", "30"],
        &["no-such-command"],
    ] {
        let o = grainy(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    assert!(files(dir.path()).is_empty());
}

#[test]
fn numerical_failures_exit_two_and_leave_nothing() {
    let dir = tempfile::tempdir().unwrap();
    // 100 samples on 1024 cells are exhausted from depth 0 on
    let o = grainy(dir.path(), &["entropy", "--grid", "32x32", "--samples", "100", "--label", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = grainy(dir.path(), &["invariant-density", "--map", "standard:K=1.2", "--grid", "8x8", "--max-iters", "1", "--label", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn config_file_and_flags_resolve_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "entropy", "map": "doubling", "grid": "64x1", "depth": 6, "samples": 100000, "seed": 3, "label": "from-file"}"#).unwrap();
    let out = dir.path().join("out");
    let a = grainy(&out, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = grainy(&out, &["entropy", "--map", "doubling", "--grid", "64x1", "--depth", "6", "--samples", "100000", "--seed", "3", "--label", "from-flags"]);
    assert_eq!(b.status.code(), Some(0));
    let read = |n: &str| std::fs::read(out.join(n)).unwrap();
    assert_eq!(read("from-file.csv"), read("from-flags.csv"));
    let json: Value = serde_json::from_slice(&read("from-file.json")).unwrap();
    let embedded: grainy::cli::ExperimentConfig = serde_json::from_value(json["config"].clone()).unwrap();
    assert_eq!(embedded.map, "doubling");
    assert_eq!(embedded.output_dir, out);
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_grainy")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("wigner-check"));
}
