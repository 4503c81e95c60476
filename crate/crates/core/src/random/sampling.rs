use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::random::RandomVector;
use crate::rng::{self, StreamRng};
use crate::scalar::Scalar;

/// Row-major matrix of realizations, one row per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix<T> {
    rows: usize,
    dim: usize,
    values: Vec<T>,
    seed: u64,
}

impl<T: Scalar> SampleMatrix<T> {
    pub fn from_rows(dim: usize, values: Vec<T>, seed: u64) -> Self {
        assert!(dim > 0 && values.len() % dim == 0, "ragged sample matrix");
        Self {
            rows: values.len() / dim,
            dim,
            values,
            seed,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[T]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

// Largest double strictly below one.
const ONE_MINUS: f64 = 1.0 - f64::EPSILON / 2.0;

#[inline]
fn open_unit(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, ONE_MINUS)
}

/// Latin Hypercube sample drawn from the `LHS` substream of `seed`.
pub fn lhs_sample<T: Scalar>(rv: &RandomVector<T>, n: usize, seed: u64) -> SampleMatrix<T> {
    let mut rng = rng::substream(seed, rng::LHS);
    lhs_sample_with(rv, n, seed, &mut rng)
}

/// Latin Hypercube sample: per dimension the n probabilities fall one per
/// stratum ((k-1)/n, k/n), strata shuffled independently per dimension,
/// each point placed uniformly within its stratum.
pub fn lhs_sample_with<T: Scalar>(
    rv: &RandomVector<T>,
    n: usize,
    seed: u64,
    rng: &mut StreamRng,
) -> SampleMatrix<T> {
    let dim = rv.dim();
    let mut values = vec![T::zero(); n * dim];
    let mut strata: Vec<usize> = (0..n).collect();
    for (j, marginal) in rv.marginals().iter().enumerate() {
        strata.shuffle(rng);
        for (i, &k) in strata.iter().enumerate() {
            let offset: f64 = rng.sample(Open01);
            let u = open_unit((k as f64 + offset) / n as f64);
            values[i * dim + j] = marginal.inverse_cdf_unchecked(T::of(u));
        }
    }
    SampleMatrix::from_rows(dim, values, seed)
}

/// i.i.d. inverse-CDF sample drawn from the `MCS` substream of `seed`.
pub fn plain_sample<T: Scalar>(rv: &RandomVector<T>, n: usize, seed: u64) -> SampleMatrix<T> {
    let mut rng = rng::substream(seed, rng::MCS);
    plain_sample_with(rv, n, seed, &mut rng)
}

/// i.i.d. inverse-CDF sample; rows are drawn in order, coordinates in order.
pub fn plain_sample_with<T: Scalar>(
    rv: &RandomVector<T>,
    n: usize,
    seed: u64,
    rng: &mut StreamRng,
) -> SampleMatrix<T> {
    let dim = rv.dim();
    let mut values = Vec::with_capacity(n * dim);
    for _ in 0..n {
        for marginal in rv.marginals() {
            let u: f64 = rng.sample(Open01);
            values.push(marginal.inverse_cdf_unchecked(T::of(open_unit(u))));
        }
    }
    SampleMatrix::from_rows(dim, values, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Marginal;

    #[test]
    fn lhs_one_point_per_stratum() {
        let rv = RandomVector::new(vec![Marginal::<f64>::uniform(0.0, 1.0).unwrap()]).unwrap();
        let s = lhs_sample(&rv, 4, 11);
        let mut bins = [0usize; 4];
        for row in s.iter_rows() {
            bins[(row[0] * 4.0).floor() as usize] += 1;
        }
        assert_eq!(bins, [1, 1, 1, 1]);
    }

    #[test]
    fn lhs_is_deterministic() {
        let rv = RandomVector::<f64>::standard_normal(3).unwrap();
        assert_eq!(lhs_sample(&rv, 50, 5), lhs_sample(&rv, 50, 5));
        assert_ne!(lhs_sample(&rv, 50, 5), lhs_sample(&rv, 50, 6));
    }

    #[test]
    fn lhs_normal_mean_near_zero() {
        let rv = RandomVector::<f64>::standard_normal(1).unwrap();
        let s = lhs_sample(&rv, 10_000, 3);
        let mean = s.values().iter().sum::<f64>() / 10_000.0;
        assert!(mean.abs() < 0.05);
    }

    #[test]
    fn lhs_empirical_cdf_within_one_stratum() {
        // Every column's empirical CDF deviates by at most 1/n from the
        // marginal CDF because each stratum holds exactly one point.
        let rv = RandomVector::new(vec![
            Marginal::normal(1.0, 0.2).unwrap(),
            Marginal::gumbel(27.0, 2.7).unwrap(),
            Marginal::uniform(-1.0, 3.0).unwrap(),
        ])
        .unwrap();
        let n = 500;
        let s = lhs_sample(&rv, n, 42);
        for (j, m) in rv.marginals().iter().enumerate() {
            let mut col: Vec<f64> = s.iter_rows().map(|r| m.cdf(r[j])).collect();
            col.sort_by(f64::total_cmp);
            let dev = col
                .iter()
                .enumerate()
                .map(|(i, &u)| (u - i as f64 / n as f64).abs().max((u - (i + 1) as f64 / n as f64).abs()))
                .fold(0.0, f64::max);
            assert!(dev <= 1.0 / n as f64 + 1e-9, "column {j}: {dev}");
        }
    }

    #[test]
    fn plain_sample_empty_and_deterministic() {
        let rv = RandomVector::<f64>::standard_normal(2).unwrap();
        assert!(plain_sample(&rv, 0, 1).is_empty());
        assert_eq!(plain_sample(&rv, 100, 9), plain_sample(&rv, 100, 9));
    }

    #[test]
    fn plain_sample_tail_fraction() {
        let rv = RandomVector::<f64>::standard_normal(1).unwrap();
        let n = 1_000_000;
        let s = plain_sample(&rv, n, 2024);
        let frac = s.values().iter().filter(|&&x| x < -2.612).count() as f64 / n as f64;
        let p = crate::normal::cdf(-2.612);
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((p - 4.5e-3).abs() < 1e-4);
        assert!((frac - p).abs() < 3.0 * sd, "{frac} vs {p}");
    }

    #[test]
    fn uniform_components_stay_in_bounds() {
        let rv = RandomVector::new(vec![Marginal::uniform(59.75, 60.25).unwrap()]).unwrap();
        for s in [lhs_sample(&rv, 1000, 1), plain_sample(&rv, 1000, 1)] {
            assert!(s.values().iter().all(|&x| (59.75..=60.25).contains(&x)));
        }
    }
}
