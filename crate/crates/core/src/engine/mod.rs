//! Reliability engines: crude Monte Carlo and the adaptive Kriging methods.

mod adaptive;
mod config;
mod evaluator;
mod mcs;
mod pool;
mod report;

pub use adaptive::{run_adaptive, run_ak_mcs, run_iskra, run_reak, RunOutcome};
pub use config::{EngineConfig, Method, SurrogateSettings};
pub use evaluator::{FnLimitState, LimitState, SubprocessEvaluator};
pub use mcs::{count_failures, cov_of_pf, crude_mcs, pool_failures, pool_truth, run_mcs, true_error_from_counts, true_error_vs_oracle};
pub use pool::DesignPool;
pub use report::{NCalls, RunFlags, RunReport, TraceEvent, TraceRecord};
