use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::LearningFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MCS", alias = "mcs")]
    Mcs,
    #[serde(rename = "AKMCS", alias = "akmcs", alias = "AK-MCS")]
    AkMcs,
    #[serde(rename = "ISKRA", alias = "iskra")]
    Iskra,
    #[serde(rename = "REAK", alias = "reak")]
    Reak,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mcs => "MCS",
            Method::AkMcs => "AKMCS",
            Method::Iskra => "ISKRA",
            Method::Reak => "REAK",
        }
    }
}

/// Surrogate refitting and caching policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateSettings {
    pub starts: usize,
    pub budget_per_dim: usize,
    pub prescan: usize,
    /// θ is re-estimated once the training set has grown by this fraction
    /// since the last estimate; in between, points are added with θ fixed.
    /// Zero re-estimates after every point.
    pub refit_growth: f64,
    /// Upper bound on cached pool projections, in scalars.
    pub max_cache_entries: usize,
}

impl Default for SurrogateSettings {
    fn default() -> Self {
        Self {
            starts: 5,
            budget_per_dim: 200,
            prescan: 20,
            refit_growth: 0.1,
            max_cache_entries: 64 << 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub method: Method,
    pub eps_thr: f64,
    pub cov_thr: f64,
    /// Pool size; for crude MCS the number of samples.
    pub n_pool_initial: usize,
    pub n_pool_increment: usize,
    /// Pool growth stops here; the run is flagged if COV is still too high.
    pub max_pool: usize,
    pub n_initial_train: usize,
    pub eff_stop: f64,
    pub gamma: f64,
    pub delta_alpha: f64,
    pub confidence_q: f64,
    pub alpha_ci: f64,
    pub seed: u64,
    pub max_calls: usize,
    pub learning: LearningFunction,
    pub surrogate: SurrogateSettings,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            method: Method::Reak,
            eps_thr: 0.05,
            cov_thr: 0.05,
            n_pool_initial: 10_000,
            n_pool_increment: 10_000,
            max_pool: 2_000_000,
            n_initial_train: 12,
            eff_stop: 1e-3,
            gamma: 5.0,
            delta_alpha: 0.01,
            confidence_q: 0.05,
            alpha_ci: 1.96,
            seed: 0,
            max_calls: 2000,
            learning: LearningFunction::Eff,
            surrogate: SurrogateSettings::default(),
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        check(self.eps_thr > 0.0 && self.eps_thr < 1.0, || {
            format!("eps_thr must lie in (0, 1), got {}", self.eps_thr)
        })?;
        check(self.cov_thr > 0.0, || format!("cov_thr must be positive, got {}", self.cov_thr))?;
        check(self.n_pool_initial >= 1, || "n_pool_initial must be at least 1".into())?;
        check(self.delta_alpha > 0.0, || {
            format!("delta_alpha must be positive, got {}", self.delta_alpha)
        })?;
        check(self.gamma >= 0.0 && self.gamma.is_finite(), || {
            format!("gamma must be non-negative, got {}", self.gamma)
        })?;
        check(self.confidence_q > 0.0 && self.confidence_q < 1.0, || {
            format!("confidence_q must lie in (0, 1), got {}", self.confidence_q)
        })?;
        check(self.alpha_ci > 0.0, || format!("alpha_ci must be positive, got {}", self.alpha_ci))?;
        check(self.eff_stop >= 0.0, || format!("eff_stop must be non-negative, got {}", self.eff_stop))?;
        check(self.surrogate.refit_growth >= 0.0, || {
            "surrogate.refit_growth must be non-negative".into()
        })?;
        if self.method != Method::Mcs {
            check(self.n_initial_train >= 2, || {
                format!("n_initial_train must be at least 2, got {}", self.n_initial_train)
            })?;
            check(self.n_initial_train <= self.n_pool_initial, || {
                "n_initial_train exceeds the pool size".into()
            })?;
            check(self.max_calls >= self.n_initial_train, || {
                "max_calls is smaller than n_initial_train".into()
            })?;
            check(self.n_pool_increment >= 1, || "n_pool_increment must be at least 1".into())?;
            check(self.surrogate.budget_per_dim >= 1, || {
                "surrogate.budget_per_dim must be at least 1".into()
            })?;
        }
        Ok(())
    }

    /// Starting ESR coefficient γ·ε_thr·n_r².
    pub fn alpha_initial(&self, n_r: usize) -> f64 {
        self.gamma * self.eps_thr * (n_r * n_r) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        EngineConfig::default().validate().unwrap();
    }

    #[test]
    fn alpha_initial_for_two_variables() {
        let c = EngineConfig::default();
        assert!((c.alpha_initial(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            EngineConfig { eps_thr: 1.5, ..Default::default() },
            EngineConfig { eps_thr: 0.0, ..Default::default() },
            EngineConfig { cov_thr: 0.0, ..Default::default() },
            EngineConfig { n_initial_train: 1, ..Default::default() },
            EngineConfig { delta_alpha: 0.0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn method_names_roundtrip() {
        for m in [Method::Mcs, Method::AkMcs, Method::Iskra, Method::Reak] {
            assert_eq!(parse_method(m.name()), m);
        }
    }

    fn parse_method(s: &str) -> Method {
        use serde::de::value::{Error as DeError, StrDeserializer};
        use serde::de::IntoDeserializer;
        let d: StrDeserializer<'_, DeError> = s.into_deserializer();
        Method::deserialize(d).unwrap()
    }
}
