//! Repeated runs over seeds and their aggregate statistics.

use std::path::Path;

use rayon::prelude::*;
use reak_core::engine::{NCalls, RunFlags, RunReport};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{check_distinct, RunConfig};
use crate::error::{HarnessError, Result};
use crate::output::{write_json, write_rows_csv};
use crate::run::{execute, Model, SingleReport};

/// Flat per-seed result, one CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub seed: u64,
    pub n_calls: Option<NCalls>,
    pub n_calls_total: Option<usize>,
    pub pf_hat: Option<f64>,
    pub pf_pool: Option<f64>,
    /// True relative error against the pool oracle.
    pub eps: Option<f64>,
    pub eps_max_hat: Option<f64>,
    pub n_pool: Option<usize>,
    pub converged: Option<bool>,
    /// Raised flags joined by `|`.
    pub flags: String,
    pub error: Option<String>,
    pub wall_time_s: Option<f64>,
}

pub fn flag_names(f: &RunFlags) -> Vec<&'static str> {
    [
        (f.max_calls_exceeded, "max_calls_exceeded"),
        (f.alpha_exhausted, "alpha_exhausted"),
        (f.degenerate_partition, "degenerate_partition"),
        (f.pool_limit, "pool_limit"),
        (f.zero_pf, "zero_pf"),
    ]
    .into_iter()
    .filter_map(|(on, name)| on.then_some(name))
    .collect()
}

impl SeedRow {
    pub fn from_report(r: &SingleReport) -> Self {
        let rep: &RunReport = &r.report;
        Self {
            seed: rep.seed,
            n_calls: Some(rep.n_calls),
            n_calls_total: Some(rep.n_calls.total()),
            pf_hat: Some(rep.pf_hat),
            pf_pool: r.oracle.map(|o| o.pf_pool),
            eps: r.true_error(),
            eps_max_hat: rep.eps_max_hat,
            n_pool: Some(rep.n_pool),
            converged: Some(rep.converged),
            flags: flag_names(&rep.flags).join("|"),
            error: None,
            wall_time_s: Some(rep.wall_time_s),
        }
    }

    pub fn failed(seed: u64, error: &HarnessError) -> Self {
        Self {
            seed,
            n_calls: None,
            n_calls_total: None,
            pf_hat: None,
            pf_pool: None,
            eps: None,
            eps_max_hat: None,
            n_pool: None,
            converged: None,
            flags: String::new(),
            error: Some(error.to_string()),
            wall_time_s: None,
        }
    }

    /// Set when the engine raised a flag that voids its error guarantee.
    /// A degenerate partition alone does not.
    pub fn flagged(&self) -> bool {
        self.flags
            .split('|')
            .any(|f| !f.is_empty() && f != "degenerate_partition")
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Sample standard deviation over the mean; undefined for a zero mean.
fn cov(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = mean(v)?;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    let c = var.sqrt() / m.abs();
    c.is_finite().then_some(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n_runs: usize,
    pub n_failed: usize,
    pub n_flagged: usize,
    pub mean_calls: Option<f64>,
    pub cov_calls: Option<f64>,
    pub mean_pf_hat: Option<f64>,
    pub cov_pf_hat: Option<f64>,
    pub mean_eps: Option<f64>,
    pub mean_eps_max_hat: Option<f64>,
    /// Mean and COV of ε̂_max − ε over runs reporting both.
    pub mean_gap: Option<f64>,
    pub cov_gap: Option<f64>,
    /// Fraction of runs with ε ≤ ε̂_max.
    pub coverage: Option<f64>,
}

/// Statistics of a set of rows; independent of their order.
pub fn aggregate(rows: &[SeedRow]) -> AggregateStats {
    let mut sorted: Vec<&SeedRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.seed);
    let ok: Vec<&SeedRow> = sorted.iter().copied().filter(|r| r.error.is_none()).collect();
    let calls: Vec<f64> = ok.iter().filter_map(|r| r.n_calls_total).map(|c| c as f64).collect();
    let pf: Vec<f64> = ok.iter().filter_map(|r| r.pf_hat).collect();
    let eps: Vec<f64> = ok.iter().filter_map(|r| r.eps).collect();
    let eps_max: Vec<f64> = ok.iter().filter_map(|r| r.eps_max_hat).collect();
    let pairs: Vec<(f64, f64)> = ok.iter().filter_map(|r| Some((r.eps?, r.eps_max_hat?))).collect();
    let gaps: Vec<f64> = pairs.iter().map(|(e, m)| m - e).collect();
    AggregateStats {
        n_runs: rows.len(),
        n_failed: rows.len() - ok.len(),
        n_flagged: ok.iter().filter(|r| r.flagged()).count(),
        mean_calls: mean(&calls),
        cov_calls: cov(&calls),
        mean_pf_hat: mean(&pf),
        cov_pf_hat: cov(&pf),
        mean_eps: mean(&eps),
        mean_eps_max_hat: mean(&eps_max),
        mean_gap: mean(&gaps),
        cov_gap: cov(&gaps),
        coverage: (!pairs.is_empty())
            .then(|| pairs.iter().filter(|(e, m)| e <= m).count() as f64 / pairs.len() as f64),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub model: String,
    pub config: Value,
    pub stats: AggregateStats,
    pub rows: Vec<SeedRow>,
}

impl SweepReport {
    /// Writes `sweep.json` and `sweep_rows.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("sweep.json"), self)?;
        write_rows_csv(&dir.join("sweep_rows.csv"), &self.rows)
    }
}

/// Runs the configured engine once per seed on `jobs` threads. Each run
/// builds its own model, so external evaluators are never shared. Failed
/// runs are kept as rows carrying their error.
pub fn run_sweep(cfg: &RunConfig, seeds: &[u64], jobs: usize) -> Result<SweepReport> {
    if seeds.len() < 2 {
        return Err(HarnessError::Config("a sweep needs at least 2 repetitions".into()));
    }
    check_distinct(seeds)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Output(format!("thread pool: {e}")))?;
    let label = cfg.model.label();
    let rows: Vec<SeedRow> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let mut engine = cfg.engine.clone();
                engine.seed = seed;
                let result = Model::instantiate(&cfg.model).and_then(|m| execute(&m, &label, &engine, cfg.oracle));
                match result {
                    Ok(run) => {
                        log::info!("{}", crate::run::summary(&run.report));
                        SeedRow::from_report(&run.report)
                    }
                    Err(e) => {
                        log::warn!("seed {seed}: {e}");
                        SeedRow::failed(seed, &e)
                    }
                }
            })
            .collect()
    });
    Ok(SweepReport {
        model: label,
        config: cfg.to_value(),
        stats: aggregate(&rows),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, calls: usize, eps: Option<f64>, eps_max: Option<f64>, flags: &str) -> SeedRow {
        SeedRow {
            seed,
            n_calls: Some(NCalls {
                initial: 12,
                adaptive: calls - 12,
            }),
            n_calls_total: Some(calls),
            pf_hat: Some(0.01),
            pf_pool: Some(0.01),
            eps,
            eps_max_hat: eps_max,
            n_pool: Some(100),
            converged: Some(flags.is_empty()),
            flags: flags.into(),
            error: None,
            wall_time_s: Some(0.5),
        }
    }

    #[test]
    fn statistics_of_rows() {
        let rows = vec![
            row(3, 20, Some(0.01), Some(0.03), ""),
            row(1, 40, Some(0.05), Some(0.02), "alpha_exhausted"),
            row(2, 30, None, Some(0.04), "degenerate_partition"),
            SeedRow::failed(9, &HarnessError::Evaluator("x".into())),
        ];
        let s = aggregate(&rows);
        assert_eq!((s.n_runs, s.n_failed, s.n_flagged), (4, 1, 1));
        assert_eq!(s.mean_calls, Some(30.0));
        assert!((s.cov_calls.unwrap() - 10.0 / 30.0).abs() < 1e-12);
        assert_eq!(s.coverage, Some(0.5));
        assert!((s.mean_gap.unwrap() + 0.005).abs() < 1e-15);
        assert!((s.mean_eps_max_hat.unwrap() - 0.03).abs() < 1e-15);
        let mut rev = rows.clone();
        rev.reverse();
        assert_eq!(aggregate(&rev), s);
    }

    #[test]
    fn empty_statistics_are_absent() {
        let s = aggregate(&[]);
        assert_eq!(s.n_runs, 0);
        assert_eq!(s.mean_calls, None);
        assert_eq!(s.coverage, None);
        assert_eq!(cov(&[0.0, 0.0]), None);
    }

    #[test]
    fn flag_names_list_raised_flags() {
        let f = RunFlags {
            alpha_exhausted: true,
            zero_pf: true,
            ..Default::default()
        };
        assert_eq!(flag_names(&f), ["alpha_exhausted", "zero_pf"]);
        assert!(flag_names(&RunFlags::default()).is_empty());
    }
}
