//! Concentrated-likelihood search over θ.
//!
//! Minimizes ln ψ(θ) by coordinate pattern search in log10 θ. Candidate
//! starts: the warm start, the best point of an isotropic log-grid prescan,
//! then log-uniform random starts. The evaluation budget is shared by the
//! starts in that order.

use rand::Rng;

use super::model::{profile_beta_sigma2, KrigingOptions, Profile};
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

const INITIAL_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-3;

struct Objective<'a, T> {
    x: &'a [T],
    dim: usize,
    y: &'a [T],
    evals: usize,
    best: Option<(f64, Vec<f64>, Profile<T>)>,
    last_error: Option<Error>,
}

impl<T: Scalar> Objective<'_, T> {
    /// ln ψ at 10^p, +∞ when the profile cannot be formed.
    fn eval(&mut self, p: &[f64]) -> f64 {
        self.evals += 1;
        let theta: Vec<T> = p.iter().map(|&v| T::of(10f64.powf(v))).collect();
        match profile_beta_sigma2(self.x, self.dim, self.y, &theta) {
            Ok(profile) => {
                let v = profile.log_psi().as_f64();
                if !v.is_finite() {
                    return f64::INFINITY;
                }
                if self.best.as_ref().is_none_or(|b| v < b.0) {
                    self.best = Some((v, p.to_vec(), profile));
                }
                v
            }
            Err(e) => {
                self.last_error = Some(e);
                f64::INFINITY
            }
        }
    }
}

fn pattern_search<T: Scalar>(
    obj: &mut Objective<'_, T>,
    start: Vec<f64>,
    bounds: (f64, f64),
    budget: usize,
) {
    let stop_at = obj.evals + budget;
    let mut p = start;
    let mut fp = obj.eval(&p);
    let mut step = INITIAL_STEP;
    while step >= MIN_STEP && obj.evals < stop_at {
        let mut improved = false;
        for i in 0..p.len() {
            for dir in [1.0, -1.0] {
                if obj.evals >= stop_at {
                    return;
                }
                let cand = (p[i] + dir * step).clamp(bounds.0, bounds.1);
                if cand == p[i] {
                    continue;
                }
                let old = p[i];
                p[i] = cand;
                let f = obj.eval(&p);
                if f < fp {
                    fp = f;
                    improved = true;
                    break;
                }
                p[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

pub(crate) fn search<T: Scalar>(
    x: &[T],
    dim: usize,
    y: &[T],
    options: &KrigingOptions,
) -> Result<(Vec<T>, Profile<T>)> {
    let (lo, hi) = options.theta_bounds;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::Config(format!("invalid theta bounds ({lo}, {hi})")));
    }
    let bounds = (lo.log10(), hi.log10());
    let mut obj = Objective {
        x,
        dim,
        y,
        evals: 0,
        best: None,
        last_error: None,
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(w) = &options.warm_start {
        if w.len() == dim && w.iter().all(|t| *t > 0.0 && t.is_finite()) {
            starts.push(w.iter().map(|t| t.log10().clamp(bounds.0, bounds.1)).collect());
        }
    }
    if options.prescan > 0 {
        let n = options.prescan;
        let mut best = (f64::INFINITY, None);
        for k in 0..n {
            let t = if n == 1 {
                0.5 * (bounds.0 + bounds.1)
            } else {
                bounds.0 + (bounds.1 - bounds.0) * k as f64 / (n - 1) as f64
            };
            let p = vec![t; dim];
            let f = obj.eval(&p);
            if f < best.0 {
                best = (f, Some(p));
            }
        }
        if let Some(p) = best.1 {
            starts.push(p);
        }
    }
    let mut rng = rng::substream(options.seed, rng::MLE_STARTS);
    let (s_lo, s_hi) = (
        options.start_range.0.max(lo).log10(),
        options.start_range.1.min(hi).log10(),
    );
    for _ in 0..options.starts {
        starts.push((0..dim).map(|_| rng.random_range(s_lo..=s_hi)).collect());
    }

    let total = options.budget_per_dim * dim;
    let n_starts = starts.len().max(1);
    for (k, s) in starts.into_iter().enumerate() {
        // Unused budget of earlier starts rolls over to later ones.
        let spent = obj.evals;
        let remaining = total.saturating_sub(spent);
        let share = remaining / (n_starts - k);
        if share == 0 {
            break;
        }
        pattern_search(&mut obj, s, bounds, share);
    }

    match obj.best {
        Some((_, p, profile)) => Ok((p.iter().map(|&v| T::of(10f64.powf(v))).collect(), profile)),
        None => Err(obj
            .last_error
            .unwrap_or(Error::NonFinite("likelihood objective"))),
    }
}
