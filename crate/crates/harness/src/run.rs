use reak_core::benchmarks::Benchmark;
use reak_core::engine::{
    pool_failures, run_adaptive, run_mcs, true_error_from_counts, EngineConfig, LimitState, Method, RunOutcome, RunReport,
    SubprocessEvaluator,
};
use reak_core::random::RandomVector;
use serde::{Deserialize, Serialize};

use crate::config::ModelSpec;
use crate::error::{HarnessError, Result};

/// A limit state ready to be evaluated.
pub enum Model {
    Builtin(Benchmark<f64>),
    External {
        g: SubprocessEvaluator,
        rv: RandomVector<f64>,
    },
}

impl Model {
    /// Builds the model; external models start their process here.
    pub fn instantiate(spec: &ModelSpec) -> Result<Self> {
        match spec {
            ModelSpec::Benchmark(kind) => Ok(Model::Builtin(Benchmark::new(*kind))),
            ModelSpec::External(ext) => {
                let rv = ext.random_vector()?;
                let g = SubprocessEvaluator::spawn(&ext.command, &ext.args, rv.dim())
                    .map_err(|e| HarnessError::Evaluator(format!("cannot start {:?}: {e}", ext.command)))?;
                Ok(Model::External { g, rv })
            }
        }
    }

    pub fn limit_state(&self) -> &dyn LimitState<f64> {
        match self {
            Model::Builtin(b) => b,
            Model::External { g, .. } => g,
        }
    }

    pub fn rv(&self) -> &RandomVector<f64> {
        match self {
            Model::Builtin(b) => b.rv(),
            Model::External { rv, .. } => rv,
        }
    }
}

/// True-sign failure fraction of the final pool and the resulting error of
/// the surrogate estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolOracle {
    pub pf_pool: f64,
    /// `None` when the pool holds no true failure.
    pub true_error: Option<f64>,
}

/// Serialized result of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleReport {
    pub model: String,
    pub report: RunReport,
    pub oracle: Option<PoolOracle>,
}

impl SingleReport {
    pub fn true_error(&self) -> Option<f64> {
        self.oracle.and_then(|o| o.true_error)
    }
}

pub struct SingleRun {
    pub report: SingleReport,
    /// Final engine state; absent for crude MCS.
    pub outcome: Option<RunOutcome<f64>>,
}

/// Runs one engine. With `oracle`, the true limit state is evaluated on the
/// whole final pool (reusing the values already computed).
pub fn execute(model: &Model, label: &str, engine: &EngineConfig, oracle: bool) -> Result<SingleRun> {
    let g = model.limit_state();
    if engine.method == Method::Mcs {
        let report = run_mcs(g, model.rv(), engine)?;
        return Ok(SingleRun {
            report: SingleReport {
                model: label.to_string(),
                report,
                oracle: None,
            },
            outcome: None,
        });
    }
    let outcome = run_adaptive(g, model.rv(), engine)?;
    let oracle = if oracle {
        let fails = pool_failures(g, &outcome.pool)?;
        Some(PoolOracle {
            pf_pool: fails as f64 / outcome.pool.len().max(1) as f64,
            true_error: true_error_from_counts(outcome.pool.n_pred_fail(), fails),
        })
    } else {
        None
    };
    Ok(SingleRun {
        report: SingleReport {
            model: label.to_string(),
            report: outcome.report.clone(),
            oracle,
        },
        outcome: Some(outcome),
    })
}

/// One-line human summary of a run.
pub fn summary(r: &SingleReport) -> String {
    let rep = &r.report;
    let mut s = format!(
        "{} {} seed {}: pf_hat {:.4e}",
        rep.method.name(),
        r.model,
        rep.seed,
        rep.pf_hat
    );
    match rep.cov_pf {
        Some(c) => s.push_str(&format!(" (COV {:.2}%)", 100.0 * c)),
        None => s.push_str(" (COV inf)"),
    }
    s.push_str(&format!(", n_calls {}, pool {}", rep.n_calls, rep.n_pool));
    if let Some(e) = rep.eps_max_hat {
        s.push_str(&format!(", eps_max_hat {e:.4}"));
    }
    if let Some(o) = r.oracle {
        s.push_str(&format!(", pool pf {:.4e}", o.pf_pool));
        if let Some(e) = o.true_error {
            s.push_str(&format!(", eps {e:.4}"));
        }
    }
    if !rep.converged {
        s.push_str(" [not converged]");
    }
    s
}
