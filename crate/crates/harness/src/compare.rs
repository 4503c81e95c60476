//! Side-by-side table of methods and error thresholds on one shared pool.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use reak_core::engine::{cov_of_pf, pool_truth, EngineConfig, Method, NCalls, RunOutcome};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::output::{write_json, write_rows_csv};
use crate::run::{execute, Model};
use crate::sweep::flag_names;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: Method,
    /// Error threshold of the run; `None` for methods without one.
    pub eps_thr: Option<f64>,
    pub n_calls: NCalls,
    pub pf_hat: f64,
    pub cov_pf: Option<f64>,
    pub eps_max_hat: Option<f64>,
    /// True relative error against the pool oracle.
    pub eps: Option<f64>,
    pub n_pool: usize,
    pub converged: bool,
    pub flags: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub model: String,
    pub seed: u64,
    pub config: Value,
    pub rows: Vec<CompareRow>,
}

/// Engine settings of every run in the table. Methods without an error
/// threshold run once.
pub fn plan(cfg: &RunConfig) -> Vec<EngineConfig> {
    let mut runs = Vec::new();
    for &method in &cfg.methods {
        let mut e = cfg.engine.clone();
        e.method = method;
        match method {
            Method::Iskra | Method::Reak => {
                for &eps in &cfg.eps_thrs {
                    runs.push(EngineConfig { eps_thr: eps, ..e.clone() });
                }
            }
            Method::AkMcs | Method::Mcs => runs.push(e),
        }
    }
    runs
}

/// Refuses runs that do not share the pool prefix and initial design, since
/// their estimates would not be comparable.
pub fn check_shared_pool(outcomes: &[&RunOutcome<f64>], n_initial: usize) -> Result<()> {
    let Some(first) = outcomes.first() else {
        return Ok(());
    };
    for (k, o) in outcomes.iter().enumerate().skip(1) {
        let n = first.pool.len().min(o.pool.len()) * first.pool.dim();
        let same_pool = o.pool.dim() == first.pool.dim() && o.pool.samples()[..n] == first.pool.samples()[..n];
        let m = n_initial.min(first.training.len()).min(o.training.len());
        let same_design = o.training[..m] == first.training[..m];
        if !same_pool || !same_design {
            return Err(HarnessError::Config(format!(
                "run {k} does not share the candidate pool of run 0; comparison refused"
            )));
        }
    }
    Ok(())
}

/// Runs the table on `jobs` threads.
pub fn run_compare(cfg: &RunConfig, jobs: usize) -> Result<CompareReport> {
    let label = cfg.model.label();
    let runs = plan(cfg);
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Output(format!("thread pool: {e}")))?;
    let results: Vec<_> = threads.install(|| {
        runs.par_iter()
            .map(|e| Model::instantiate(&cfg.model).and_then(|m| execute(&m, &label, e, cfg.oracle)))
            .collect::<Result<Vec<_>>>()
    })?;

    let adaptive: Vec<&RunOutcome<f64>> = results.iter().filter_map(|r| r.outcome.as_ref()).collect();
    check_shared_pool(&adaptive, cfg.engine.n_initial_train)?;

    let mut rows: Vec<CompareRow> = runs
        .iter()
        .zip(&results)
        .map(|(e, r)| {
            let rep = &r.report.report;
            CompareRow {
                method: rep.method,
                eps_thr: matches!(rep.method, Method::Iskra | Method::Reak).then_some(e.eps_thr),
                n_calls: rep.n_calls,
                pf_hat: rep.pf_hat,
                cov_pf: rep.cov_pf,
                eps_max_hat: if rep.method == Method::Reak { rep.eps_max_hat } else { None },
                eps: r.report.true_error(),
                n_pool: rep.n_pool,
                converged: rep.converged,
                flags: flag_names(&rep.flags).join("|"),
            }
        })
        .collect();

    // Crude MCS reference on the largest final pool, which contains all others.
    if cfg.oracle && !cfg.methods.contains(&Method::Mcs) {
        if let Some(largest) = adaptive.iter().max_by_key(|o| o.pool.len()) {
            let model = Model::instantiate(&cfg.model)?;
            let pf = pool_truth(model.limit_state(), &largest.pool)?;
            let n = largest.pool.len();
            let cov = cov_of_pf(pf, n);
            rows.push(CompareRow {
                method: Method::Mcs,
                eps_thr: None,
                n_calls: NCalls {
                    initial: n,
                    adaptive: 0,
                },
                pf_hat: pf,
                cov_pf: cov.is_finite().then_some(cov),
                eps_max_hat: None,
                eps: None,
                n_pool: n,
                converged: true,
                flags: String::new(),
            });
        }
    }
    Ok(CompareReport {
        model: label,
        seed: cfg.engine.seed,
        config: cfg.to_value(),
        rows,
    })
}

fn fmt_opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| "-".into(), f)
}

impl CompareReport {
    /// Fixed-width text table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (seed {})", self.model, self.seed);
        let _ = writeln!(
            s,
            "{:<7} {:>7} {:>14} {:>12} {:>8} {:>9} {:>9} {:>9}  {}",
            "method", "eps_thr", "N_call", "pf_hat", "COV", "eps_max", "eps", "pool", "flags"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<7} {:>7} {:>14} {:>12.4e} {:>8} {:>9} {:>9} {:>9}  {}",
                r.method.name(),
                fmt_opt(r.eps_thr, |v| format!("{v}")),
                r.n_calls.to_string(),
                r.pf_hat,
                fmt_opt(r.cov_pf, |v| format!("{:.2}%", 100.0 * v)),
                fmt_opt(r.eps_max_hat, |v| format!("{:.2}%", 100.0 * v)),
                fmt_opt(r.eps, |v| format!("{:.2}%", 100.0 * v)),
                r.n_pool,
                r.flags
            );
        }
        s
    }

    /// Writes `compare.json`, `compare.csv` and `compare.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("compare.json"), self)?;
        write_rows_csv(&dir.join("compare.csv"), &self.rows)?;
        std::fs::write(dir.join("compare.txt"), self.table()).map_err(|e| HarnessError::io(dir.join("compare.txt"), e))
    }
}
