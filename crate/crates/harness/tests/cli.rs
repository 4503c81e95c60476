use std::path::Path;
use std::process::{Command, Output};

use reak_harness::output::read_json;
use reak_harness::SingleReport;
use serde_json::json;

fn reak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reak"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, doc: serde_json::Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_benchmarks_succeeds() {
    let o = reak(&["list-benchmarks"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["series4", "rastrigin2", "oscillator6", "tube9", "table2", "table10"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), json!({"benchmark": "series4", "eps_thresh": 0.05}));
    let out = dir.path().join("out");
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("eps_thresh"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), json!({"benchmark": "series4", "eps_thr": 1.5}));
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = reak(&["run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        json!({"benchmark": "series4", "method": "REAK", "n_pool_initial": 3000, "n_pool_increment": 3000,
               "cov_thr": 0.2, "seed": 4}),
    );
    let out = dir.path().join("out");
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["effective_config.json", "report.json", "trace.csv", "pool.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let rep: SingleReport = read_json(&out.join("report.json")).unwrap();
    assert_eq!(rep.report.seed, 4);
    assert!(rep.oracle.is_some());
    let raw: serde_json::Value = read_json(&out.join("report.json")).unwrap();
    let calls = raw["report"]["n_calls"].as_str().unwrap();
    assert!(calls.starts_with("12 + "), "{calls}");

    let header = std::fs::read_to_string(out.join("pool.csv")).unwrap();
    assert_eq!(
        header.lines().next().unwrap(),
        "x1,x2,density,pred_mean,pred_sd,pred_fail,in_esr,evaluated,g"
    );
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), rep.report.trace.len() + 1);

    // The effective configuration reproduces the run.
    let out2 = dir.path().join("out2");
    let o = reak(&[
        "run",
        "--config",
        out.join("effective_config.json").to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rep2: SingleReport = read_json(&out2.join("report.json")).unwrap();
    assert_eq!(rep2.report.without_timing(), rep.report.without_timing());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), json!({"benchmark": "series4", "method": "MCS", "n_pool_initial": 1000}));
    let env_dir = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_reak"))
        .args(["run", "--config", &cfg])
        .env("REAK_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(env_dir.join("report.json").exists());
}

#[test]
fn exhausted_budget_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        json!({"benchmark": "rastrigin2", "method": "AKMCS", "n_pool_initial": 2000, "max_calls": 20}),
    );
    let out = dir.path().join("out");
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let rep: SingleReport = read_json(&out.join("report.json")).unwrap();
    assert!(rep.report.flags.max_calls_exceeded);
    assert_eq!(rep.report.n_calls.total(), 20);
}

#[test]
fn external_evaluator_runs() {
    let dir = tempfile::tempdir().unwrap();
    let script = "while read -r a; do awk -v a=\"$a\" 'BEGIN { print 2 - a }'; done";
    let cfg = write_config(
        dir.path(),
        json!({"evaluator": {"command": "sh", "args": ["-c", script],
                             "variables": [{"distribution": "normal", "mean": 0.0, "sd": 1.0}]},
               "method": "AKMCS", "n_pool_initial": 5000, "cov_thr": 0.2, "seed": 3}),
    );
    let out = dir.path().join("out");
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: SingleReport = read_json(&out.join("report.json")).unwrap();
    // P(X ≥ 2) = 0.02275; the pool holds 5000 samples.
    assert!((rep.report.pf_hat - 0.02275).abs() < 4.0 * (0.02275 * 0.977_25_f64 / 5000.0).sqrt());
    assert!(rep.oracle.is_none());
}

#[test]
fn evaluator_failures_exit_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        json!({"evaluator": {"command": "sh", "args": ["-c", "while read -r a; do echo nan-ish; done"],
                             "variables": [{"distribution": "normal", "mean": 0.0, "sd": 1.0}]},
               "method": "AKMCS", "n_pool_initial": 100}),
    );
    let out = dir.path().join("out");
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(out.join("error.json").exists());

    let cfg = write_config(
        dir.path(),
        json!({"evaluator": {"command": "/nonexistent/model", "variables": [{"distribution": "normal", "mean": 0.0, "sd": 1.0}]}}),
    );
    let o = reak(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn sweep_and_compare_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        json!({"benchmark": "series4", "n_pool_initial": 3000, "n_pool_increment": 3000, "cov_thr": 0.2,
               "seed": 1, "eps_thrs": [0.05, 0.2]}),
    );
    let out = dir.path().join("sweep");
    let o = reak(&["sweep", "--config", &cfg, "--reps", "3", "--jobs", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("sweep.json").exists() && out.join("sweep_rows.csv").exists());

    let o = reak(&["sweep", "--config", &cfg, "--reps", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let out = dir.path().join("compare");
    let o = reak(&["compare", "--config", &cfg, "--jobs", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = String::from_utf8_lossy(&o.stdout);
    for m in ["AKMCS", "ISKRA", "REAK", "MCS"] {
        assert!(table.contains(m), "{table}");
    }
    let csv = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    // AK-MCS once, two thresholds each for ISKRA and REAK, the MCS reference.
    assert_eq!(csv.lines().count(), 1 + 1 + 2 + 2 + 1);
}
