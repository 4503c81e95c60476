use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::Method;
use crate::error_bound::ErrorBound;
use crate::kriging::ModelSummary;

/// Number of limit-state evaluations, split into the initial design and the
/// adaptively added points. Serialized as `"12 + 48"`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NCalls {
    pub initial: usize,
    pub adaptive: usize,
}

impl NCalls {
    pub fn total(&self) -> usize {
        self.initial + self.adaptive
    }
}

impl fmt::Display for NCalls {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}", self.initial, self.adaptive)
    }
}

impl FromStr for NCalls {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid call count {s:?}"))
        };
        match s.split_once('+') {
            Some((a, b)) => Ok(Self {
                initial: parse(a)?,
                adaptive: parse(b)?,
            }),
            None => Ok(Self {
                initial: parse(s)?,
                adaptive: 0,
            }),
        }
    }
}

impl Serialize for NCalls {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NCalls {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    /// One learning step: the score maximum was checked and, unless
    /// learning converged, a point was added.
    Learn,
    /// Maximum error rate evaluated after learning converged.
    Bound,
    PoolGrowth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub event: TraceEvent,
    pub n_train: usize,
    pub n_pool: usize,
    pub alpha: f64,
    pub omega2_size: usize,
    /// Best learning score of the step (EFF, or −U).
    pub max_score: Option<f64>,
    /// Pool index of the added point.
    pub added: Option<usize>,
    pub pf_hat: f64,
    pub eps_max: Option<f64>,
    pub bound: Option<ErrorBound>,
    pub theta_refit: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunFlags {
    pub max_calls_exceeded: bool,
    /// α reached zero with the error bound still above threshold.
    pub alpha_exhausted: bool,
    /// Some partition requested more excluded points than the pool holds.
    pub degenerate_partition: bool,
    /// Pool growth stopped at its cap with COV above threshold.
    pub pool_limit: bool,
    /// No predicted failure: COV undefined.
    pub zero_pf: bool,
}

impl RunFlags {
    pub fn any(&self) -> bool {
        self.max_calls_exceeded || self.alpha_exhausted || self.pool_limit || self.zero_pf
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub seed: u64,
    pub pf_hat: f64,
    /// `None` stands for an infinite COV (no failures).
    pub cov_pf: Option<f64>,
    pub n_calls: NCalls,
    pub n_pool: usize,
    /// ε̂_max for REAK, the fixed α for ISKRA.
    pub eps_max_hat: Option<f64>,
    pub final_alpha: Option<f64>,
    pub converged: bool,
    pub flags: RunFlags,
    /// Variances clamped from below at zero in the final predictions.
    pub clamped_variances: usize,
    pub theta_refits: usize,
    pub model: Option<ModelSummary>,
    pub trace: Vec<TraceRecord>,
    pub wall_time_s: f64,
}

impl RunReport {
    /// Copy with the wall-clock time zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn call_counts_render_and_parse() {
        let n = NCalls {
            initial: 12,
            adaptive: 48,
        };
        assert_eq!(n.to_string(), "12 + 48");
        assert_eq!("12 + 48".parse::<NCalls>().unwrap(), n);
        assert_eq!("7".parse::<NCalls>().unwrap().total(), 7);
        assert!("x + 1".parse::<NCalls>().is_err());
        assert_eq!(n.total(), 60);
    }
}
