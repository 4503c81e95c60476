use std::time::Instant;

use rayon::prelude::*;

use super::config::{EngineConfig, Method};
use super::evaluator::LimitState;
use super::pool::DesignPool;
use super::report::{NCalls, RunFlags, RunReport};
use crate::error::{Error, Result};
use crate::random::{plain_sample, RandomVector};
use crate::scalar::Scalar;

/// Coefficient of variation √((1 − pf)/(pf·n)); +∞ when pf = 0.
pub fn cov_of_pf(pf: f64, n: usize) -> f64 {
    if !(pf > 0.0) || n == 0 {
        return f64::INFINITY;
    }
    ((1.0 - pf) / (pf * n as f64)).max(0.0).sqrt()
}

/// |pf_hat / pf_ref − 1|; `None` when pf_ref = 0.
pub fn true_error_vs_oracle(pf_hat: f64, pf_ref: f64) -> Option<f64> {
    if pf_ref > 0.0 {
        Some((pf_hat / pf_ref - 1.0).abs())
    } else {
        None
    }
}

/// |n_hat − n_ref| / n_ref from failure counts on the same pool; `None`
/// when n_ref = 0. A single rounding keeps equal rates bitwise equal.
pub fn true_error_from_counts(n_hat: usize, n_ref: usize) -> Option<f64> {
    (n_ref > 0).then(|| n_hat.abs_diff(n_ref) as f64 / n_ref as f64)
}

/// Evaluates every row and counts g ≤ 0. Errors name the first failing row.
pub fn count_failures<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, samples: &[T], offset: usize) -> Result<usize> {
    let dim = g.dim();
    samples
        .par_chunks(dim)
        .enumerate()
        .map(|(i, x)| match g.evaluate(x) {
            Ok(v) if v.is_finite() => Ok(usize::from(v <= T::zero())),
            Ok(v) => Err(Error::Evaluation {
                index: offset + i,
                reason: format!("non-finite response {v}"),
            }),
            Err(reason) => Err(Error::Evaluation {
                index: offset + i,
                reason,
            }),
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Failure fraction of the pool under the true g, reusing responses that
/// were already evaluated.
pub fn pool_truth<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, pool: &DesignPool<T>) -> Result<f64> {
    if pool.is_empty() {
        return Ok(0.0);
    }
    Ok(pool_failures(g, pool)? as f64 / pool.len() as f64)
}

/// Number of pool points failing under the true g.
pub fn pool_failures<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, pool: &DesignPool<T>) -> Result<usize> {
    let fails = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            let v = match pool.evaluated(i) {
                Some(v) => v,
                None => g.evaluate(pool.row(i)).map_err(|reason| Error::Evaluation { index: i, reason })?,
            };
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    index: i,
                    reason: format!("non-finite response {v}"),
                });
            }
            Ok(usize::from(v <= T::zero()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(fails)
}

const MCS_CHUNK: usize = 1 << 16;

/// Crude Monte Carlo with `n` i.i.d. samples from the `MCS` substream.
pub fn crude_mcs<T: Scalar, G: LimitState<T> + ?Sized>(
    g: &G,
    rv: &RandomVector<T>,
    n: usize,
    seed: u64,
) -> Result<RunReport> {
    if n == 0 {
        return Err(Error::Config("crude MCS needs at least one sample".into()));
    }
    if g.dim() != rv.dim() {
        return Err(Error::DimensionMismatch {
            expected: rv.dim(),
            got: g.dim(),
        });
    }
    let start = Instant::now();
    let samples = plain_sample(rv, n, seed);
    let dim = rv.dim();
    let mut fails = 0;
    for (k, chunk) in samples.values().chunks(MCS_CHUNK * dim).enumerate() {
        fails += count_failures(g, chunk, k * MCS_CHUNK)?;
    }
    let pf = fails as f64 / n as f64;
    let cov = cov_of_pf(pf, n);
    Ok(RunReport {
        method: Method::Mcs,
        seed,
        pf_hat: pf,
        cov_pf: cov.is_finite().then_some(cov),
        n_calls: NCalls {
            initial: n,
            adaptive: 0,
        },
        n_pool: n,
        eps_max_hat: None,
        final_alpha: None,
        converged: true,
        flags: RunFlags {
            zero_pf: fails == 0,
            ..Default::default()
        },
        clamped_variances: 0,
        theta_refits: 0,
        model: None,
        trace: Vec::new(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Crude MCS driven by an engine configuration (`n_pool_initial` samples).
pub fn run_mcs<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, rv: &RandomVector<T>, cfg: &EngineConfig) -> Result<RunReport> {
    cfg.validate()?;
    crude_mcs(g, rv, cfg.n_pool_initial, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::FnLimitState;

    #[test]
    fn cov_examples() {
        assert!((cov_of_pf(4.498e-3, 1_000_000) - 0.014_87).abs() < 1e-5);
        assert_eq!(cov_of_pf(1.0, 10), 0.0);
        assert!((cov_of_pf(2.847e-2, 70_000) - 0.0221).abs() < 1e-4);
        assert_eq!(cov_of_pf(0.0, 100), f64::INFINITY);
    }

    #[test]
    fn true_error_examples() {
        assert_eq!(true_error_vs_oracle(0.3, 0.3), Some(0.0));
        assert!((true_error_vs_oracle(4.401e-3, 4.498e-3).unwrap() - 0.0216).abs() < 1e-4);
        assert_eq!(true_error_vs_oracle(0.2, 0.1), Some(1.0));
        assert_eq!(true_error_vs_oracle(0.2, 0.0), None);
    }

    #[test]
    fn count_error_matches_the_bound_at_a_tie() {
        use crate::error_bound::eps_max_from_range;
        assert_eq!(true_error_from_counts(5, 0), None);
        assert_eq!(true_error_from_counts(3, 4), Some(0.25));
        // 451 predicted and 450 true failures; the bound endpoint is the same rate.
        let bound = eps_max_from_range(440.0, 11.0, (10.0, 10.0));
        assert_eq!(true_error_from_counts(451, 450).unwrap().to_bits(), bound.to_bits());
        let bound = eps_max_from_range(405.0, 10.0, (8.0, 8.0));
        assert_eq!(true_error_from_counts(415, 413).unwrap().to_bits(), bound.to_bits());
    }

    #[test]
    fn constant_failure() {
        let rv = RandomVector::<f64>::standard_normal(1).unwrap();
        let g = FnLimitState::new(1, |_: &[f64]| -1.0);
        let r = crude_mcs(&g, &rv, 1000, 1).unwrap();
        assert_eq!(r.pf_hat, 1.0);
        assert_eq!(r.cov_pf, Some(0.0));
        assert_eq!(r.n_calls.total(), 1000);
    }

    #[test]
    fn half_space() {
        let rv = RandomVector::<f64>::standard_normal(1).unwrap();
        let g = FnLimitState::new(1, |x: &[f64]| x[0]);
        let r = crude_mcs(&g, &rv, 1_000_000, 7).unwrap();
        assert!((r.pf_hat - 0.5).abs() < 0.0015);
    }

    #[test]
    fn non_finite_response_is_an_error() {
        let rv = RandomVector::<f64>::standard_normal(1).unwrap();
        let g = FnLimitState::new(1, |x: &[f64]| if x[0] > 2.0 { f64::NAN } else { 1.0 });
        assert!(matches!(crude_mcs(&g, &rv, 10_000, 1), Err(Error::Evaluation { .. })));
    }
}
