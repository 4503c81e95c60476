use serde::{Deserialize, Serialize};

use super::poisson_binomial::{self, QuantileMethod};
use crate::rng;

/// Predicted-sign bookkeeping for one partition.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WrongSignCounts {
    pub n_omega1_fail_hat: usize,
    pub n_omega2_fail_hat: usize,
    /// Wrong-sign probabilities of the Ω₂ points predicted safe.
    pub p_wrong_safe: Vec<f64>,
    /// Wrong-sign probabilities of the Ω₂ points predicted to fail.
    pub p_wrong_fail: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSettings {
    /// Normal multiplier of the safe-side interval.
    pub alpha_ci: f64,
    /// Two-sided tail mass of the fail-side interval.
    pub confidence_q: f64,
    /// Fail-side sets larger than this use Monte Carlo.
    pub exact_limit: usize,
    pub mc_draws: usize,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self {
            alpha_ci: 1.96,
            confidence_q: 0.05,
            exact_limit: poisson_binomial::EXACT_LIMIT,
            mc_draws: poisson_binomial::DEFAULT_MC_DRAWS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub safe_wse_ci: (f64, f64),
    pub fail_wse_ci: (f64, f64),
    /// Conservative range of the true number of failures in Ω₂.
    pub n_omega2_fail_range: (f64, f64),
    pub eps_max: f64,
    pub confidence: f64,
}

/// Normal-approximation interval (μ ∓ α_ci·σ, floored at 0) for the number
/// of wrong signs among independent points.
pub fn safe_wse_interval(p_wrong: &[f64], alpha_ci: f64) -> (f64, f64) {
    let mu: f64 = p_wrong.iter().sum();
    let var: f64 = p_wrong.iter().map(|p| p * (1.0 - p)).sum();
    let half = alpha_ci * var.max(0.0).sqrt();
    ((mu - half).max(0.0), mu + half)
}

/// Largest relative error |N₂ᶠ − I| / (N₁ᶠ + I) over the range endpoints I.
/// An endpoint with zero denominator counts as 1 unless its numerator is
/// also zero.
pub fn eps_max_from_range(n1f: f64, n2f: f64, range: (f64, f64)) -> f64 {
    let rate = |i: f64| {
        let num = (n2f - i).abs();
        let den = n1f + i;
        if den > 0.0 {
            num / den
        } else if num > 0.0 {
            1.0
        } else {
            0.0
        }
    };
    rate(range.0).max(rate(range.1))
}

/// Conservative maximum error rate of the failure-probability estimate.
/// With no predicted failures anywhere the rate is 1: nothing supports
/// stopping.
///
/// Monte Carlo quantiles, when needed, draw from the `ERROR_BOUND + index`
/// substream of `seed`.
pub fn max_error_rate(
    counts: &WrongSignCounts,
    settings: &BoundSettings,
    seed: u64,
    index: u64,
) -> ErrorBound {
    let q = settings.confidence_q;
    let fail = &counts.p_wrong_fail;
    let method = if fail.len() <= settings.exact_limit {
        QuantileMethod::Exact
    } else {
        QuantileMethod::MonteCarlo {
            draws: settings.mc_draws,
        }
    };
    let fail_wse_ci = match method {
        QuantileMethod::Exact => {
            let f = poisson_binomial::pmf(fail);
            (
                poisson_binomial::quantile_of_pmf(&f, q / 2.0) as f64,
                poisson_binomial::quantile_of_pmf(&f, 1.0 - q / 2.0) as f64,
            )
        }
        QuantileMethod::MonteCarlo { draws } => {
            let mut rng = rng::substream(seed, rng::ERROR_BOUND.wrapping_add(index));
            let sums = poisson_binomial::simulate_sums(fail, draws, &mut rng);
            (
                poisson_binomial::empirical_quantile(&sums, q / 2.0) as f64,
                poisson_binomial::empirical_quantile(&sums, 1.0 - q / 2.0) as f64,
            )
        }
    };
    let safe_wse_ci = safe_wse_interval(&counts.p_wrong_safe, settings.alpha_ci);
    let n1f = counts.n_omega1_fail_hat as f64;
    let n2f = counts.n_omega2_fail_hat as f64;
    let range = ((n2f - fail_wse_ci.1).max(0.0), n2f + safe_wse_ci.1);
    ErrorBound {
        safe_wse_ci,
        fail_wse_ci,
        n_omega2_fail_range: range,
        eps_max: if n1f + n2f == 0.0 {
            1.0
        } else {
            eps_max_from_range(n1f, n2f, range)
        },
        confidence: 1.0 - q,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn safe_interval_examples() {
        assert_eq!(safe_wse_interval(&[], 1.96), (0.0, 0.0));
        assert_eq!(safe_wse_interval(&[0.0; 5], 1.96), (0.0, 0.0));
        let (lo, hi) = safe_wse_interval(&[0.1; 100], 1.96);
        assert!((lo - 4.12).abs() < 1e-12 && (hi - 15.88).abs() < 1e-12);
    }

    #[test]
    fn hand_example() {
        let e = eps_max_from_range(100.0, 5.0, (3.0, 8.0));
        assert!((e - 3.0 / 108.0).abs() < 1e-15);
        assert!((e - 0.02778).abs() < 1e-5);
    }

    #[test]
    fn empty_excluded_region() {
        let c = WrongSignCounts {
            n_omega1_fail_hat: 37,
            ..Default::default()
        };
        let b = max_error_rate(&c, &BoundSettings::default(), 0, 0);
        assert_eq!(b.n_omega2_fail_range, (0.0, 0.0));
        assert_eq!(b.eps_max, 0.0);
    }

    #[test]
    fn no_failures_anywhere_is_total_uncertainty() {
        assert_eq!(eps_max_from_range(0.0, 0.0, (0.0, 1.0)), 1.0);
        assert_eq!(eps_max_from_range(0.0, 0.0, (0.0, 0.0)), 0.0);
        let c = WrongSignCounts {
            p_wrong_safe: vec![0.0; 4],
            ..Default::default()
        };
        assert_eq!(max_error_rate(&c, &BoundSettings::default(), 0, 0).eps_max, 1.0);
    }

    #[test]
    fn endpoint_is_the_maximum() {
        for (n1, n2, lo, hi) in [(100.0, 5.0, 3.0, 8.0), (3.0, 10.0, 0.0, 25.0), (0.0, 4.0, 1.0, 9.0)] {
            let e = eps_max_from_range(n1, n2, (lo, hi));
            for k in 0..=100 {
                let i: f64 = lo + (hi - lo) * k as f64 / 100.0;
                assert!((n2 - i).abs() / (n1 + i) <= e + 1e-15);
            }
        }
    }

    #[test]
    fn exact_and_mc_paths_agree() {
        let c = WrongSignCounts {
            n_omega1_fail_hat: 40,
            n_omega2_fail_hat: 12,
            p_wrong_safe: vec![0.05; 30],
            p_wrong_fail: (0..12).map(|i| 0.02 * i as f64).collect(),
        };
        let exact = max_error_rate(&c, &BoundSettings::default(), 3, 0);
        let mc = max_error_rate(
            &c,
            &BoundSettings {
                exact_limit: 0,
                ..Default::default()
            },
            3,
            0,
        );
        assert!((exact.fail_wse_ci.1 - mc.fail_wse_ci.1).abs() <= 1.0);
        assert_eq!(exact.safe_wse_ci, mc.safe_wse_ci);
        assert!(exact.eps_max > 0.0);
    }
}
