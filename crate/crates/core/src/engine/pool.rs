use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::error_bound::DensityRanking;
use crate::random::{lhs_sample, plain_sample_with, RandomVector};
use crate::rng;
use crate::scalar::Scalar;

/// Candidate design samples with their densities, current surrogate
/// predictions and the true responses gathered so far.
#[derive(Clone, Debug)]
pub struct DesignPool<T> {
    dim: usize,
    seed: u64,
    samples: Vec<T>,
    density: Vec<T>,
    ranking: DensityRanking,
    pub pred_mean: Vec<T>,
    pub pred_sd: Vec<T>,
    evaluated: Vec<Option<T>>,
    /// Ω₁ membership from the last partition.
    pub in_esr: Vec<bool>,
    growth_steps: u64,
}

fn densities<T: Scalar>(rv: &RandomVector<T>, samples: &[T]) -> Result<Vec<T>> {
    samples
        .par_chunks(rv.dim())
        .map(|x| rv.joint_pdf(x))
        .collect()
}

impl<T: Scalar> DesignPool<T> {
    /// Latin Hypercube pool from the `LHS` substream of `seed`.
    pub fn lhs(rv: &RandomVector<T>, n: usize, seed: u64) -> Result<Self> {
        let samples = lhs_sample(rv, n, seed).into_values();
        Self::from_samples(rv, samples, seed)
    }

    pub fn from_samples(rv: &RandomVector<T>, samples: Vec<T>, seed: u64) -> Result<Self> {
        let dim = rv.dim();
        if samples.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: samples.len() % dim,
            });
        }
        let n = samples.len() / dim;
        let density = densities(rv, &samples)?;
        let ranking = DensityRanking::new(&density);
        Ok(Self {
            dim,
            seed,
            samples,
            density,
            ranking,
            pred_mean: vec![T::zero(); n],
            pred_sd: vec![T::zero(); n],
            evaluated: vec![None; n],
            in_esr: vec![true; n],
            growth_steps: 0,
        })
    }

    /// Appends `n` i.i.d. samples drawn from the `POOL_GROWTH + k` substream,
    /// k counting previous growth steps. Returns the new rows.
    pub fn grow(&mut self, rv: &RandomVector<T>, n: usize) -> Result<&[T]> {
        let mut stream = rng::substream(self.seed, rng::POOL_GROWTH + self.growth_steps);
        let fresh = plain_sample_with(rv, n, self.seed, &mut stream).into_values();
        let density = densities(rv, &fresh)?;
        let start = self.samples.len();
        self.samples.extend_from_slice(&fresh);
        self.density.extend(density);
        self.ranking = DensityRanking::new(&self.density);
        self.pred_mean.resize(self.len(), T::zero());
        self.pred_sd.resize(self.len(), T::zero());
        self.evaluated.resize(self.len(), None);
        self.in_esr.resize(self.len(), true);
        self.growth_steps += 1;
        Ok(&self.samples[start..])
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn growth_steps(&self) -> u64 {
        self.growth_steps
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn density(&self) -> &[T] {
        &self.density
    }

    pub fn ranking(&self) -> &DensityRanking {
        &self.ranking
    }

    pub fn evaluated(&self, i: usize) -> Option<T> {
        self.evaluated[i]
    }

    pub fn is_evaluated(&self, i: usize) -> bool {
        self.evaluated[i].is_some()
    }

    pub fn set_evaluated(&mut self, i: usize, g: T) {
        self.evaluated[i] = Some(g);
    }

    pub fn n_evaluated(&self) -> usize {
        self.evaluated.iter().filter(|e| e.is_some()).count()
    }

    /// Predicted failure: mean ≤ 0.
    pub fn pred_fail(&self, i: usize) -> bool {
        self.pred_mean[i] <= T::zero()
    }

    pub fn n_pred_fail(&self) -> usize {
        self.pred_mean.iter().filter(|m| **m <= T::zero()).count()
    }

    /// Fraction of the pool predicted to fail.
    pub fn pf_hat(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.n_pred_fail() as f64 / self.len() as f64
    }

    pub fn set_predictions(&mut self, mean: &[T], raw_variance: &[T]) {
        self.pred_mean.clear();
        self.pred_mean.extend_from_slice(mean);
        self.pred_sd.clear();
        self.pred_sd.extend(raw_variance.iter().map(|v| v.max(T::zero()).sqrt()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_match_joint_pdf() {
        let rv = RandomVector::<f64>::standard_normal(2).unwrap();
        let pool = DesignPool::lhs(&rv, 100, 1).unwrap();
        for i in 0..pool.len() {
            assert_eq!(pool.density()[i], rv.joint_pdf(pool.row(i)).unwrap());
        }
    }

    #[test]
    fn growth_is_deterministic_and_distinct() {
        let rv = RandomVector::<f64>::standard_normal(2).unwrap();
        let mut a = DesignPool::lhs(&rv, 50, 4).unwrap();
        let mut b = DesignPool::lhs(&rv, 50, 4).unwrap();
        let first = a.grow(&rv, 20).unwrap().to_vec();
        assert_eq!(first, b.grow(&rv, 20).unwrap());
        let second = a.grow(&rv, 20).unwrap().to_vec();
        assert_ne!(first, second);
        assert_eq!(a.len(), 90);
        assert_eq!(a.ranking().len(), 90);
    }

    #[test]
    fn predicted_failures() {
        let rv = RandomVector::<f64>::standard_normal(1).unwrap();
        let mut pool = DesignPool::lhs(&rv, 4, 0).unwrap();
        pool.set_predictions(&[-1.0, 0.0, 2.0, 3.0], &[1.0, -1e-18, 4.0, 0.0]);
        assert_eq!(pool.n_pred_fail(), 2);
        assert_eq!(pool.pf_hat(), 0.5);
        assert_eq!(pool.pred_sd, vec![1.0, 0.0, 2.0, 0.0]);
    }
}
