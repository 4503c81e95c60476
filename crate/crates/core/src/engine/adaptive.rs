use std::time::Instant;

use log::debug;
use rand::seq::index;
use rayon::prelude::*;

use super::config::{EngineConfig, Method};
use super::evaluator::LimitState;
use super::mcs::cov_of_pf;
use super::pool::DesignPool;
use super::report::{NCalls, RunFlags, RunReport, TraceEvent, TraceRecord};
use crate::error::{Error, Result};
use crate::error_bound::{build_partition, max_error_rate, BoundSettings, ErrorBound, EsrPartition, WrongSignCounts};
use crate::kriging::{KrigingModel, KrigingOptions, QueryCache};
use crate::learning::{select_next, wrong_sign_prob};
use crate::random::RandomVector;
use crate::rng;
use crate::scalar::Scalar;

/// Final state of an adaptive run.
#[derive(Clone, Debug)]
pub struct RunOutcome<T> {
    pub report: RunReport,
    pub pool: DesignPool<T>,
    pub model: KrigingModel<T>,
    /// Partition in force when the run ended.
    pub partition: EsrPartition,
    /// Pool indices of the training points in evaluation order.
    pub training: Vec<usize>,
}

/// AK-MCS: global learning over the whole pool.
pub fn run_ak_mcs<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, rv: &RandomVector<T>, cfg: &EngineConfig) -> Result<RunOutcome<T>> {
    expect_method(cfg, Method::AkMcs)?;
    run_adaptive(g, rv, cfg)
}

/// ISKRA: learning restricted to a sampling region of fixed α = ε_thr.
pub fn run_iskra<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, rv: &RandomVector<T>, cfg: &EngineConfig) -> Result<RunOutcome<T>> {
    expect_method(cfg, Method::Iskra)?;
    run_adaptive(g, rv, cfg)
}

/// REAK: the sampling region is widened until the maximum error rate drops
/// below ε_thr.
pub fn run_reak<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, rv: &RandomVector<T>, cfg: &EngineConfig) -> Result<RunOutcome<T>> {
    expect_method(cfg, Method::Reak)?;
    run_adaptive(g, rv, cfg)
}

fn expect_method(cfg: &EngineConfig, m: Method) -> Result<()> {
    if cfg.method == m {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "engine for {} called with method {}",
            m.name(),
            cfg.method.name()
        )))
    }
}

/// Dispatches on `cfg.method`; crude MCS is not an adaptive method.
pub fn run_adaptive<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, rv: &RandomVector<T>, cfg: &EngineConfig) -> Result<RunOutcome<T>> {
    cfg.validate()?;
    if cfg.method == Method::Mcs {
        return Err(Error::Config("crude MCS has no adaptive engine".into()));
    }
    if g.dim() != rv.dim() {
        return Err(Error::DimensionMismatch {
            expected: rv.dim(),
            got: g.dim(),
        });
    }
    Engine::start(g, rv, cfg)?.run()
}

struct Engine<'a, T, G: ?Sized> {
    g: &'a G,
    rv: &'a RandomVector<T>,
    cfg: &'a EngineConfig,
    started: Instant,
    pool: DesignPool<T>,
    model: KrigingModel<T>,
    cache: QueryCache<T>,
    training: Vec<usize>,
    n_initial: usize,
    last_refit_m: usize,
    refits: usize,
    trace: Vec<TraceRecord>,
    flags: RunFlags,
    bound_index: u64,
}

impl<'a, T: Scalar, G: LimitState<T> + ?Sized> Engine<'a, T, G> {
    fn start(g: &'a G, rv: &'a RandomVector<T>, cfg: &'a EngineConfig) -> Result<Self> {
        let started = Instant::now();
        let mut pool = DesignPool::lhs(rv, cfg.n_pool_initial, cfg.seed)?;
        let mut pick = rng::substream(cfg.seed, rng::INITIAL_TRAINING);
        let training = index::sample(&mut pick, pool.len(), cfg.n_initial_train).into_vec();
        let dim = rv.dim();
        let mut x = Vec::with_capacity(training.len() * dim);
        let mut y = Vec::with_capacity(training.len());
        for &i in &training {
            let v = evaluate(g, &pool, i)?;
            pool.set_evaluated(i, v);
            x.extend_from_slice(pool.row(i));
            y.push(v);
        }
        let model = KrigingModel::fit(&x, dim, &y, &kriging_options(cfg, None))?;
        let cache = QueryCache::new(&model, pool.samples(), cfg.surrogate.max_cache_entries);
        pool.set_predictions(cache.mean(), cache.raw_variance());
        Ok(Self {
            g,
            rv,
            cfg,
            started,
            pool,
            model,
            cache,
            n_initial: training.len(),
            last_refit_m: training.len(),
            training,
            refits: 1,
            trace: Vec::new(),
            flags: RunFlags::default(),
            bound_index: 0,
        })
    }

    fn calls(&self) -> usize {
        self.training.len()
    }

    fn alpha_at(&self, decrements: usize) -> f64 {
        match self.cfg.method {
            Method::AkMcs | Method::Mcs => 0.0,
            Method::Iskra => self.cfg.eps_thr,
            Method::Reak => {
                let a = self.cfg.alpha_initial(self.rv.dim()) - decrements as f64 * self.cfg.delta_alpha;
                // Repeated decrements may leave rounding dust above zero.
                if a < 1e-9 * self.cfg.delta_alpha {
                    0.0
                } else {
                    a
                }
            }
        }
    }

    fn partition(&mut self, alpha: f64) -> EsrPartition {
        let p = build_partition(self.pool.ranking(), self.pool.density(), alpha, self.pool.pf_hat());
        self.flags.degenerate_partition |= p.degenerate;
        self.pool.in_esr = p.esr_mask(self.pool.len());
        p
    }

    fn record(&mut self, event: TraceEvent, alpha: f64, p: &EsrPartition) -> &mut TraceRecord {
        self.trace.push(TraceRecord {
            iteration: self.trace.len(),
            event,
            n_train: self.model.n_train(),
            n_pool: self.pool.len(),
            alpha,
            omega2_size: p.omega2_idx.len(),
            max_score: None,
            added: None,
            pf_hat: self.pool.pf_hat(),
            eps_max: None,
            bound: None,
            theta_refit: false,
        });
        self.trace.last_mut().expect("just pushed")
    }

    /// Learns inside the current sampling region until the best score
    /// signals convergence. Returns false when the call budget ran out.
    fn learn(&mut self, alpha: f64) -> Result<(bool, EsrPartition)> {
        loop {
            let part = self.partition(alpha);
            let learning = self.cfg.learning;
            let mask: Vec<bool> = (0..self.pool.len())
                .map(|i| self.pool.in_esr[i] && !self.pool.is_evaluated(i))
                .collect();
            let scores: Vec<T> = self
                .pool
                .pred_mean
                .par_iter()
                .zip(&self.pool.pred_sd)
                .zip(&mask)
                .map(|((&m, &s), &on)| if on { learning.score(m, s) } else { T::zero() })
                .collect();
            let (best, value) = match select_next(&scores, &mask) {
                Ok(b) => b,
                Err(Error::EmptySelection) => {
                    self.record(TraceEvent::Learn, alpha, &part);
                    return Ok((true, part));
                }
                Err(e) => return Err(e),
            };
            if learning.converged(value, T::of(self.cfg.eff_stop)) {
                self.record(TraceEvent::Learn, alpha, &part).max_score = Some(value.as_f64());
                return Ok((true, part));
            }
            if self.calls() >= self.cfg.max_calls {
                self.flags.max_calls_exceeded = true;
                self.record(TraceEvent::Learn, alpha, &part).max_score = Some(value.as_f64());
                return Ok((false, part));
            }
            let refit = self.add_point(best)?;
            let rec = self.record(TraceEvent::Learn, alpha, &part);
            rec.max_score = Some(value.as_f64());
            rec.added = Some(best);
            rec.theta_refit = refit;
        }
    }

    /// Evaluates pool point `i`, adds it to the model and refreshes the pool
    /// predictions. Returns whether θ was re-estimated.
    fn add_point(&mut self, i: usize) -> Result<bool> {
        let x = self.pool.row(i).to_vec();
        if self.model.contains(&x) {
            let v = self.model.predict_mean(&x);
            self.pool.set_evaluated(i, v);
            return Ok(false);
        }
        let y = evaluate(self.g, &self.pool, i)?;
        self.pool.set_evaluated(i, y);
        self.training.push(i);
        let m = self.model.n_train() + 1;
        let due = m as f64 >= self.last_refit_m as f64 * (1.0 + self.cfg.surrogate.refit_growth);
        let refit = due
            || match self.model.extend(&x, y) {
                Ok(ext) => {
                    self.cache.update(&self.model, &ext);
                    false
                }
                Err(e) => {
                    debug!("bordering failed ({e}); re-estimating θ");
                    true
                }
            };
        if refit {
            self.refit()?;
        }
        self.pool.set_predictions(self.cache.mean(), self.cache.raw_variance());
        Ok(refit)
    }

    fn refit(&mut self) -> Result<()> {
        let dim = self.pool.dim();
        let mut x = Vec::with_capacity(self.training.len() * dim);
        let mut y = Vec::with_capacity(self.training.len());
        for &i in &self.training {
            x.extend_from_slice(self.pool.row(i));
            y.push(self.pool.evaluated(i).expect("training point evaluated"));
        }
        let warm: Vec<f64> = self.model.theta().iter().map(|t| t.as_f64()).collect();
        self.model = KrigingModel::fit(&x, dim, &y, &kriging_options(self.cfg, Some(warm)))?;
        self.cache.rebuild(&self.model);
        self.last_refit_m = self.training.len();
        self.refits += 1;
        Ok(())
    }

    fn bound(&mut self, part: &EsrPartition) -> ErrorBound {
        let pool = &self.pool;
        let mut counts = WrongSignCounts {
            n_omega1_fail_hat: part.omega1_idx.iter().filter(|&&i| pool.pred_fail(i)).count(),
            ..Default::default()
        };
        for &i in &part.omega2_idx {
            let p = if pool.is_evaluated(i) {
                0.0
            } else {
                wrong_sign_prob(pool.pred_mean[i], pool.pred_sd[i]).as_f64()
            };
            if pool.pred_fail(i) {
                counts.n_omega2_fail_hat += 1;
                counts.p_wrong_fail.push(p);
            } else {
                counts.p_wrong_safe.push(p);
            }
        }
        let settings = BoundSettings {
            alpha_ci: self.cfg.alpha_ci,
            confidence_q: self.cfg.confidence_q,
            ..Default::default()
        };
        let b = max_error_rate(&counts, &settings, self.cfg.seed, self.bound_index);
        self.bound_index += 1;
        b
    }

    fn grow_pool(&mut self) -> Result<()> {
        let fresh = self.pool.grow(self.rv, self.cfg.n_pool_increment)?.to_vec();
        self.cache.append(&self.model, &fresh);
        self.pool.set_predictions(self.cache.mean(), self.cache.raw_variance());
        Ok(())
    }

    fn run(mut self) -> Result<RunOutcome<T>> {
        let mut decrements = 0usize;
        let mut eps_max_hat = None;
        let part = loop {
            let alpha = self.alpha_at(decrements);
            let (ok, part) = self.learn(alpha)?;
            if !ok {
                if self.cfg.method == Method::Reak {
                    let b = self.bound(&part);
                    eps_max_hat = Some(b.eps_max);
                    let rec = self.record(TraceEvent::Bound, alpha, &part);
                    rec.eps_max = Some(b.eps_max);
                    rec.bound = Some(b);
                }
                break part;
            }
            if self.cfg.method == Method::Reak {
                let b = self.bound(&part);
                eps_max_hat = Some(b.eps_max);
                let rec = self.record(TraceEvent::Bound, alpha, &part);
                rec.eps_max = Some(b.eps_max);
                rec.bound = Some(b);
                if b.eps_max > self.cfg.eps_thr {
                    if alpha > 0.0 {
                        decrements += 1;
                        continue;
                    }
                    self.flags.alpha_exhausted = true;
                }
            }
            let pf = self.pool.pf_hat();
            if pf == 0.0 {
                // More samples cannot create predicted failures.
                break part;
            }
            if cov_of_pf(pf, self.pool.len()) > self.cfg.cov_thr {
                if self.pool.len() + self.cfg.n_pool_increment > self.cfg.max_pool {
                    self.flags.pool_limit = true;
                    break part;
                }
                self.grow_pool()?;
                let alpha = self.alpha_at(decrements);
                let p = self.partition(alpha);
                self.record(TraceEvent::PoolGrowth, alpha, &p);
                continue;
            }
            break part;
        };

        let pf = self.pool.pf_hat();
        let cov = cov_of_pf(pf, self.pool.len());
        self.flags.zero_pf = pf == 0.0;
        let alpha = self.alpha_at(decrements);
        let eps_max_hat = match self.cfg.method {
            Method::Reak => eps_max_hat,
            Method::Iskra => Some(self.cfg.eps_thr),
            _ => None,
        };
        let report = RunReport {
            method: self.cfg.method,
            seed: self.cfg.seed,
            pf_hat: pf,
            cov_pf: cov.is_finite().then_some(cov),
            n_calls: NCalls {
                initial: self.n_initial,
                adaptive: self.calls() - self.n_initial,
            },
            n_pool: self.pool.len(),
            eps_max_hat,
            final_alpha: matches!(self.cfg.method, Method::Reak | Method::Iskra).then_some(alpha),
            converged: !self.flags.any(),
            flags: self.flags,
            clamped_variances: self.cache.raw_variance().iter().filter(|v| **v < T::zero()).count(),
            theta_refits: self.refits,
            model: Some(self.model.summary()),
            trace: self.trace,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        Ok(RunOutcome {
            report,
            pool: self.pool,
            model: self.model,
            partition: part,
            training: self.training,
        })
    }
}

fn kriging_options(cfg: &EngineConfig, warm_start: Option<Vec<f64>>) -> KrigingOptions {
    KrigingOptions {
        starts: cfg.surrogate.starts,
        budget_per_dim: cfg.surrogate.budget_per_dim,
        prescan: cfg.surrogate.prescan,
        seed: cfg.seed,
        warm_start,
        ..Default::default()
    }
}

fn evaluate<T: Scalar, G: LimitState<T> + ?Sized>(g: &G, pool: &DesignPool<T>, i: usize) -> Result<T> {
    match g.evaluate(pool.row(i)) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::Evaluation {
            index: i,
            reason: format!("non-finite response {v}"),
        }),
        Err(reason) => Err(Error::Evaluation { index: i, reason }),
    }
}
