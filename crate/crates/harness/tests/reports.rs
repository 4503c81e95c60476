use reak_core::benchmarks::{Benchmark, BenchmarkKind};
use reak_core::engine::{run_adaptive, EngineConfig, Method};
use reak_harness::compare::check_shared_pool;
use reak_harness::output::{read_json, read_rows_csv, write_json};
use reak_harness::{aggregate, execute, run_sweep, Model, RunConfig, SeedRow, SingleReport, SweepReport};
use serde_json::json;

fn small() -> RunConfig {
    RunConfig::from_value(json!({"benchmark": "series4", "method": "REAK", "n_pool_initial": 3000,
                                 "n_pool_increment": 3000, "cov_thr": 0.2, "seed": 2}))
    .unwrap()
}

#[test]
fn report_json_round_trips_exactly() {
    let cfg = small();
    let model = Model::instantiate(&cfg.model).unwrap();
    let run = execute(&model, "series4", &cfg.engine, true).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    write_json(&path, &run.report).unwrap();
    let back: SingleReport = read_json(&path).unwrap();
    assert_eq!(back, run.report);
    assert_eq!(back.report.pf_hat.to_bits(), run.report.report.pf_hat.to_bits());
    assert_eq!(back.report.wall_time_s.to_bits(), run.report.report.wall_time_s.to_bits());
}

#[test]
fn aggregate_is_recomputable_from_persisted_rows() {
    let cfg = small();
    let report = run_sweep(&cfg, &[5, 6, 7], 3).unwrap();
    assert_eq!(report.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [5, 6, 7]);
    let dir = tempfile::tempdir().unwrap();
    report.write(dir.path()).unwrap();
    let rows: Vec<SeedRow> = read_rows_csv(&dir.path().join("sweep_rows.csv")).unwrap();
    assert_eq!(rows, report.rows);
    assert_eq!(aggregate(&rows), report.stats);
    let doc: SweepReport = read_json(&dir.path().join("sweep.json")).unwrap();
    assert_eq!(doc, report);
    assert_eq!(report.stats.n_runs, 3);
    assert!(report.stats.mean_calls.unwrap() >= 12.0);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let cfg = small();
    let a = run_sweep(&cfg, &[1, 2], 1).unwrap();
    let b = run_sweep(&cfg, &[1, 2], 2).unwrap();
    let strip = |r: &SweepReport| {
        r.rows
            .iter()
            .map(|x| SeedRow {
                wall_time_s: None,
                ..x.clone()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn sweep_rejects_repeated_seeds() {
    assert!(run_sweep(&small(), &[3, 3], 1).is_err());
    assert!(run_sweep(&small(), &[3], 1).is_err());
}

#[test]
fn comparison_refuses_different_pools() {
    let b = Benchmark::<f64>::new(BenchmarkKind::Series4);
    let cfg = |method, seed| EngineConfig {
        method,
        n_pool_initial: 3000,
        n_pool_increment: 3000,
        cov_thr: 0.2,
        seed,
        ..Default::default()
    };
    let a = run_adaptive(&b, b.rv(), &cfg(Method::AkMcs, 1)).unwrap();
    let r = run_adaptive(&b, b.rv(), &cfg(Method::Reak, 1)).unwrap();
    let other = run_adaptive(&b, b.rv(), &cfg(Method::Reak, 2)).unwrap();
    assert!(check_shared_pool(&[&a, &r], 12).is_ok());
    let e = check_shared_pool(&[&a, &r, &other], 12).unwrap_err();
    assert!(e.to_string().contains("run 2"), "{e}");
}

#[test]
fn crude_mcs_matches_the_reference_estimate() {
    let cfg = RunConfig::from_value(json!({"benchmark": "series4", "method": "MCS", "n_pool_initial": 1_000_000, "seed": 1}))
        .unwrap();
    let model = Model::instantiate(&cfg.model).unwrap();
    let run = execute(&model, "series4", &cfg.engine, true).unwrap();
    let pf = run.report.report.pf_hat;
    // Four standard errors around the reference 4.498e-3.
    assert!((pf - 4.498e-3).abs() < 4.0 * (4.498e-3 / 1e6_f64).sqrt(), "{pf}");
    assert!(run.outcome.is_none());
}
