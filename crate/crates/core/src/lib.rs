//! Adaptive Kriging structural reliability analysis.
//!
//! Failure probabilities P(g(X) ≤ 0) are estimated over a candidate pool with
//! an ordinary Kriging surrogate that is refined one point at a time. Besides
//! crude Monte Carlo and AK-MCS, the engines restrict refinement to an
//! effective sampling region of high input density and bound the relative
//! error caused by the unrefined remainder.
//!
//! Numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the precision.
//!
//! ```
//! use reak_core::{Benchmark64, EngineConfig, Method, run_adaptive};
//! use reak_core::benchmarks::BenchmarkKind;
//!
//! let bench = Benchmark64::new(BenchmarkKind::Series4);
//! let cfg = EngineConfig {
//!     method: Method::Reak,
//!     n_pool_initial: 2_000,
//!     cov_thr: 0.5,
//!     seed: 3,
//!     ..Default::default()
//! };
//! let out = run_adaptive(&bench, bench.rv(), &cfg).unwrap();
//! assert!(out.report.pf_hat > 0.0);
//! ```

pub mod benchmarks;
pub mod engine;
pub mod error;
pub mod error_bound;
pub mod kriging;
pub mod learning;
pub mod normal;
pub mod random;
pub mod rng;
pub mod scalar;

pub use engine::{
    crude_mcs, run_adaptive, run_ak_mcs, run_iskra, run_reak, EngineConfig, LimitState, Method,
    RunReport,
};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type KrigingModel64 = kriging::KrigingModel<f64>;
pub type KrigingModel32 = kriging::KrigingModel<f32>;
pub type RandomVector64 = random::RandomVector<f64>;
pub type RandomVector32 = random::RandomVector<f32>;
pub type Marginal64 = random::Marginal<f64>;
pub type Marginal32 = random::Marginal<f32>;
pub type Benchmark64 = benchmarks::Benchmark<f64>;
pub type Benchmark32 = benchmarks::Benchmark<f32>;
pub type DesignPool64 = engine::DesignPool<f64>;
pub type RunOutcome64 = engine::RunOutcome<f64>;
