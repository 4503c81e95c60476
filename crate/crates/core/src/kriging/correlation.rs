use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Separable anisotropic Gaussian correlation ∏ exp(−θ_i (x_i − w_i)²).
pub fn gaussian_correlation<T: Scalar>(x: &[T], w: &[T], theta: &[T]) -> Result<T> {
    if x.len() != w.len() || x.len() != theta.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.len(),
            got: if x.len() != theta.len() { x.len() } else { w.len() },
        });
    }
    Ok(correlation(x, w, theta))
}

/// Unchecked kernel: the product is folded into a single exponential.
#[inline]
pub(crate) fn correlation<T: Scalar>(x: &[T], w: &[T], theta: &[T]) -> T {
    let mut s = T::zero();
    for ((&a, &b), &t) in x.iter().zip(w).zip(theta) {
        let d = a - b;
        s += t * d * d;
    }
    (-s).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_fully_correlated() {
        assert_eq!(gaussian_correlation(&[0.3, -2.0], &[0.3, -2.0], &[4.0, 0.1]).unwrap(), 1.0);
    }

    #[test]
    fn one_dimensional_unit_distance() {
        let r = gaussian_correlation::<f64>(&[1.0], &[0.0], &[1.0]).unwrap();
        assert!((r - 0.367_879_4).abs() < 1e-7);
    }

    #[test]
    fn anisotropic_product_form() {
        // exp(-2·1²) · exp(-0.5·2²) = e⁻⁴
        let r = gaussian_correlation(&[1.0, 2.0], &[0.0, 0.0], &[2.0, 0.5]).unwrap();
        let by_hand = (-2.0f64).exp() * (-0.5f64 * 4.0).exp();
        assert!((r - by_hand).abs() < 1e-16);
        assert!((r - (-4.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(gaussian_correlation(&[1.0, 2.0], &[0.0], &[1.0, 1.0]).is_err());
        assert!(gaussian_correlation(&[1.0], &[0.0], &[1.0, 1.0]).is_err());
    }
}
