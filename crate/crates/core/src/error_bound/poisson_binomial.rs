use rand::Rng;

use crate::rng::StreamRng;

/// Slack on the CDF comparison absorbing rounding in the convolution.
const CDF_TOL: f64 = 1e-12;

/// Largest vector handled by the exact convolution in [`quantile`].
pub const EXACT_LIMIT: usize = 1000;
pub const DEFAULT_MC_DRAWS: usize = 100_000;

/// How the quantile of a sum of independent Bernoullis is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantileMethod {
    Exact,
    MonteCarlo { draws: usize },
}

/// Probability mass function of the number of successes, by convolving the
/// Bernoullis one at a time.
pub fn pmf(probs: &[f64]) -> Vec<f64> {
    let mut f = vec![0.0; probs.len() + 1];
    f[0] = 1.0;
    for (n, &p) in probs.iter().enumerate() {
        for j in (1..=n + 1).rev() {
            f[j] = f[j] * (1.0 - p) + f[j - 1] * p;
        }
        f[0] *= 1.0 - p;
    }
    f
}

/// Smallest k with P(S ≤ k) ≥ q, computed exactly.
pub fn exact_quantile(probs: &[f64], q: f64) -> usize {
    quantile_of_pmf(&pmf(probs), q)
}

pub(crate) fn quantile_of_pmf(pmf: &[f64], q: f64) -> usize {
    let mut cdf = 0.0;
    for (k, &m) in pmf.iter().enumerate() {
        cdf += m;
        if cdf + CDF_TOL >= q {
            return k;
        }
    }
    pmf.len() - 1
}

/// Simulated sums, sorted.
pub fn simulate_sums(probs: &[f64], draws: usize, rng: &mut StreamRng) -> Vec<usize> {
    let mut sums: Vec<usize> = (0..draws)
        .map(|_| probs.iter().filter(|&&p| rng.random::<f64>() < p).count())
        .collect();
    sums.sort_unstable();
    sums
}

/// Smallest k whose empirical CDF among sorted simulated sums reaches q.
pub fn empirical_quantile(sorted_sums: &[usize], q: f64) -> usize {
    if sorted_sums.is_empty() {
        return 0;
    }
    let n = sorted_sums.len();
    let need = ((q * n as f64) - CDF_TOL * n as f64).ceil().max(1.0) as usize;
    sorted_sums[need.min(n) - 1]
}

/// Quantile of the Poisson-binomial sum of `probs`; `rng` is only used by
/// the Monte Carlo method.
pub fn quantile(probs: &[f64], q: f64, method: QuantileMethod, rng: &mut StreamRng) -> usize {
    match method {
        QuantileMethod::Exact => exact_quantile(probs, q),
        QuantileMethod::MonteCarlo { draws } => {
            empirical_quantile(&simulate_sums(probs, draws, rng), q)
        }
    }
}

/// Exact below [`EXACT_LIMIT`] points, Monte Carlo above.
pub fn default_method(n: usize, draws: usize) -> QuantileMethod {
    if n <= EXACT_LIMIT {
        QuantileMethod::Exact
    } else {
        QuantileMethod::MonteCarlo { draws }
    }
}
