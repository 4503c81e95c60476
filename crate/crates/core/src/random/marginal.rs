use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::scalar::Scalar;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginalKind {
    /// `param1` = mean, `param2` = standard deviation.
    Normal,
    /// `param1` = lower bound, `param2` = upper bound.
    Uniform,
    /// Largest-value Gumbel; `param1` = mean, `param2` = standard deviation.
    Gumbel,
}

impl MarginalKind {
    pub fn name(self) -> &'static str {
        match self {
            MarginalKind::Normal => "normal",
            MarginalKind::Uniform => "uniform",
            MarginalKind::Gumbel => "gumbel",
        }
    }
}

/// A one-dimensional distribution, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Marginal<T> {
    kind: MarginalKind,
    param1: T,
    param2: T,
}

impl<T: Scalar> Marginal<T> {
    pub fn new(kind: MarginalKind, param1: T, param2: T) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidMarginal {
            kind: kind.name(),
            reason,
        };
        if !param1.is_finite() || !param2.is_finite() {
            return Err(invalid("parameters must be finite".into()));
        }
        match kind {
            MarginalKind::Normal | MarginalKind::Gumbel if param2 <= T::zero() => Err(invalid(
                format!("standard deviation must be positive, got {param2}"),
            )),
            MarginalKind::Uniform if param1 >= param2 => Err(invalid(format!(
                "lower bound {param1} must be below upper bound {param2}"
            ))),
            _ => Ok(Self {
                kind,
                param1,
                param2,
            }),
        }
    }

    pub fn normal(mean: T, sd: T) -> Result<Self> {
        Self::new(MarginalKind::Normal, mean, sd)
    }

    pub fn standard_normal() -> Self {
        Self {
            kind: MarginalKind::Normal,
            param1: T::zero(),
            param2: T::one(),
        }
    }

    pub fn uniform(lower: T, upper: T) -> Result<Self> {
        Self::new(MarginalKind::Uniform, lower, upper)
    }

    pub fn gumbel(mean: T, sd: T) -> Result<Self> {
        Self::new(MarginalKind::Gumbel, mean, sd)
    }

    pub fn kind(&self) -> MarginalKind {
        self.kind
    }

    pub fn params(&self) -> (T, T) {
        (self.param1, self.param2)
    }

    pub fn mean(&self) -> T {
        match self.kind {
            MarginalKind::Normal | MarginalKind::Gumbel => self.param1,
            MarginalKind::Uniform => (self.param1 + self.param2) * T::of(0.5),
        }
    }

    pub fn std_dev(&self) -> T {
        match self.kind {
            MarginalKind::Normal | MarginalKind::Gumbel => self.param2,
            MarginalKind::Uniform => (self.param2 - self.param1) / T::of(12f64.sqrt()),
        }
    }

    /// Location and scale of the Gumbel parameterization matching the
    /// stored mean and standard deviation.
    pub fn gumbel_location_scale(&self) -> (T, T) {
        let scale = self.param2 * T::of(6f64.sqrt() / std::f64::consts::PI);
        let location = self.param1 - T::of(EULER_GAMMA) * scale;
        (location, scale)
    }

    pub fn pdf(&self, x: T) -> T {
        match self.kind {
            MarginalKind::Normal => {
                let z = (x - self.param1) / self.param2;
                T::of(normal::INV_SQRT_2PI) * (-(z * z) * T::of(0.5)).exp() / self.param2
            }
            MarginalKind::Uniform => {
                if x < self.param1 || x > self.param2 {
                    T::zero()
                } else {
                    T::one() / (self.param2 - self.param1)
                }
            }
            MarginalKind::Gumbel => {
                let (location, scale) = self.gumbel_location_scale();
                let z = (x - location) / scale;
                (-(z + (-z).exp())).exp() / scale
            }
        }
    }

    pub fn cdf(&self, x: T) -> T {
        match self.kind {
            MarginalKind::Normal => {
                T::of(normal::cdf(((x - self.param1) / self.param2).as_f64()))
            }
            MarginalKind::Uniform => {
                if x <= self.param1 {
                    T::zero()
                } else if x >= self.param2 {
                    T::one()
                } else {
                    (x - self.param1) / (self.param2 - self.param1)
                }
            }
            MarginalKind::Gumbel => {
                let (location, scale) = self.gumbel_location_scale();
                let z = (x - location) / scale;
                (-(-z).exp()).exp()
            }
        }
    }

    /// Quantile function for `u` in the open interval (0, 1).
    pub fn inverse_cdf(&self, u: T) -> Result<T> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::ProbabilityDomain(u.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(self.inverse_cdf_unchecked(u))
    }

    pub(crate) fn inverse_cdf_unchecked(&self, u: T) -> T {
        match self.kind {
            MarginalKind::Normal => {
                self.param1 + self.param2 * T::of(normal::quantile(u.as_f64()))
            }
            MarginalKind::Uniform => self.param1 + (self.param2 - self.param1) * u,
            MarginalKind::Gumbel => {
                let (location, scale) = self.gumbel_location_scale();
                location - scale * T::of((-u.as_f64().ln()).ln())
            }
        }
    }
}
