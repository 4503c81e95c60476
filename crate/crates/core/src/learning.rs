//! Acquisition scores over Kriging predictions and masked selection of the
//! next training point. The limit state is g = 0.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::scalar::Scalar;

/// Expected feasibility of a prediction N(mean, sd²) around g = 0, with
/// feasibility half-width 2·sd.
///
/// Evaluated in the reduced variable t = |mean|/sd. The function is even
/// in the mean; the closed form can round slightly below zero far from the
/// limit state, so the result is clamped at zero.
pub fn eff<T: Scalar>(mean: T, sd: T) -> T {
    T::of(eff_f64(mean.as_f64(), sd.as_f64()))
}

fn eff_f64(mean: f64, sd: f64) -> f64 {
    if !(sd > 0.0) {
        return 0.0;
    }
    let t = (mean / sd).abs();
    if !t.is_finite() {
        return 0.0;
    }
    let cdf = normal::cdf;
    let pdf = normal::pdf;
    let first = t * (2.0 * cdf(-t) - cdf(-2.0 - t) - cdf(2.0 - t));
    let second = 2.0 * pdf(t) - pdf(t + 2.0) - pdf(t - 2.0);
    let third = 2.0 * (cdf(2.0 - t) - cdf(-2.0 - t));
    (sd * (first - second + third)).max(0.0)
}

/// |mean| / sd, with `T::max_value()` standing in for +∞ when sd = 0.
pub fn u_score<T: Scalar>(mean: T, sd: T) -> T {
    if sd > T::zero() {
        mean.abs() / sd
    } else if mean == T::zero() {
        T::zero()
    } else {
        T::max_value()
    }
}

/// Probability that the predicted sign of g is wrong: Φ(−|mean|/sd).
pub fn wrong_sign_prob<T: Scalar>(mean: T, sd: T) -> T {
    if mean == T::zero() {
        return T::of(0.5);
    }
    if !(sd > T::zero()) {
        return T::zero();
    }
    T::of(normal::upper_tail((mean / sd).as_f64()))
}

/// Learning criterion used to pick the next training point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearningFunction {
    #[default]
    Eff,
    U,
}

impl LearningFunction {
    /// Score to maximize: EFF, or −U.
    pub fn score<T: Scalar>(self, mean: T, sd: T) -> T {
        match self {
            LearningFunction::Eff => eff(mean, sd),
            LearningFunction::U => -u_score(mean, sd),
        }
    }

    /// Whether the best score means learning is complete: max EFF ≤ `eff_stop`
    /// or min U ≥ 2.
    pub fn converged<T: Scalar>(self, best: T, eff_stop: T) -> bool {
        match self {
            LearningFunction::Eff => best <= eff_stop,
            LearningFunction::U => -best >= T::of(2.0),
        }
    }
}

/// Per-point scores over a pool with the masked EFF maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct AcquisitionScores<T> {
    pub eff: Vec<T>,
    pub u: Vec<T>,
    pub p_wrong: Vec<T>,
    pub best_index: usize,
    pub best_value: T,
}

impl<T: Scalar> AcquisitionScores<T> {
    pub fn compute(mean: &[T], sd: &[T], mask: &[bool]) -> Result<Self> {
        assert_eq!(mean.len(), sd.len());
        let eff: Vec<T> = mean.par_iter().zip(sd).map(|(&m, &s)| eff(m, s)).collect();
        let u = mean.iter().zip(sd).map(|(&m, &s)| u_score(m, s)).collect();
        let p_wrong = mean.iter().zip(sd).map(|(&m, &s)| wrong_sign_prob(m, s)).collect();
        let (best_index, best_value) = select_next(&eff, mask)?;
        Ok(Self {
            eff,
            u,
            p_wrong,
            best_index,
            best_value,
        })
    }
}

/// Argmax of `scores` over the indices where `mask` is true; the lowest
/// index wins ties. Scores outside the mask are ignored.
pub fn select_next<T: Scalar>(scores: &[T], mask: &[bool]) -> Result<(usize, T)> {
    assert_eq!(scores.len(), mask.len(), "score and mask lengths differ");
    let mut best: Option<(usize, T)> = None;
    for (i, (&s, &m)) in scores.iter().zip(mask).enumerate() {
        if m && best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.ok_or(Error::EmptySelection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eff_on_the_limit_state() {
        // −[2φ(0) − 2φ(2)] + 2[Φ(2) − Φ(−2)]
        assert_abs_diff_eq!(eff(0.0, 1.0), 1.219_096_844_430_794, epsilon = 1e-14);
        assert_abs_diff_eq!(eff(0.0, 3.0), 3.0 * 1.219_096_844_430_794, epsilon = 1e-13);
    }

    #[test]
    fn eff_degenerate_cases() {
        assert!(eff(10.0, 0.1) < 1e-300);
        assert_eq!(eff(3.0, 0.0), 0.0);
        assert_eq!(eff(-3.0, 0.0), 0.0);
        assert_eq!(eff(0.0, 0.0), 0.0);
        assert!(eff(1e300, 1e-300) == 0.0);
    }

    #[test]
    fn eff_even_and_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..80 {
            let m = i as f64 * 0.1;
            let e = eff(m, 1.0);
            assert_eq!(e, eff(-m, 1.0));
            assert!(e < prev, "not decreasing at {m}");
            prev = e;
        }
    }

    #[test]
    fn u_and_wrong_sign() {
        assert_eq!(u_score(2.0, 1.0), 2.0);
        assert_eq!(u_score(0.0, 5.0), 0.0);
        assert_eq!(u_score(1.0, 0.0), f64::MAX);
        assert_eq!(u_score(0.0, 0.0), 0.0);
        assert_eq!(wrong_sign_prob(0.0, 1.0), 0.5);
        assert_abs_diff_eq!(wrong_sign_prob(3.0, 1.0), 1.349_898e-3, epsilon = 1e-9);
        assert_abs_diff_eq!(wrong_sign_prob(-2.0, 1.0), 0.022_750_13, epsilon = 1e-8);
        assert_eq!(wrong_sign_prob(-7.0, 0.0), 0.0);
    }

    #[test]
    fn selection_honours_mask_and_ties() {
        assert_eq!(select_next(&[0.3], &[true]).unwrap(), (0, 0.3));
        assert_eq!(select_next(&[0.2, 0.2, 0.2], &[false, true, true]).unwrap().0, 1);
        let eff = [0.1, 0.9, 0.5, 0.4];
        assert_eq!(select_next(&eff, &[true, false, true, true]).unwrap(), (2, 0.5));
        assert!(matches!(select_next(&eff, &[false; 4]), Err(Error::EmptySelection)));
    }

    #[test]
    fn scores_bundle() {
        let mean = [0.0, 1.0, -2.0];
        let sd = [1.0, 1.0, 0.5];
        let s = AcquisitionScores::compute(&mean, &sd, &[true; 3]).unwrap();
        assert_eq!(s.best_index, 0);
        assert_eq!(s.u, vec![0.0, 1.0, 4.0]);
        assert!(s.p_wrong.iter().all(|&p| (0.0..=0.5).contains(&p)));
    }

    #[test]
    fn learning_function_stopping() {
        assert!(LearningFunction::Eff.converged(5e-4, 1e-3));
        assert!(!LearningFunction::Eff.converged(2e-3, 1e-3));
        let best = LearningFunction::U.score(2.5, 1.0);
        assert!(LearningFunction::U.converged(best, 1e-3));
        assert!(!LearningFunction::U.converged(LearningFunction::U.score(1.0, 1.0), 1e-3));
    }
}
