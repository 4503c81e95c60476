//! Run configuration: one JSON document holding harness keys and engine
//! settings side by side, optionally expanded from a named preset.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use reak_core::benchmarks::{Benchmark, BenchmarkKind};
use reak_core::engine::{EngineConfig, Method};
use reak_core::random::{Marginal, RandomVector};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{HarnessError, Result};

/// Named experiment settings, keyed by table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Series system, single full-scale runs.
    Table2,
    /// Series system, repeated runs on smaller pools.
    Table3,
    Table4,
    Table7,
    Table10,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Table2, Preset::Table3, Preset::Table4, Preset::Table7, Preset::Table10];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table2 => "table2",
            Preset::Table3 => "table3",
            Preset::Table4 => "table4",
            Preset::Table7 => "table7",
            Preset::Table10 => "table10",
        }
    }

    pub fn benchmark(self) -> BenchmarkKind {
        match self {
            Preset::Table2 | Preset::Table3 => BenchmarkKind::Series4,
            Preset::Table4 => BenchmarkKind::Rastrigin2,
            Preset::Table7 => BenchmarkKind::Oscillator6,
            Preset::Table10 => BenchmarkKind::Tube9,
        }
    }

    /// Engine settings that differ from the benchmark defaults.
    fn engine_overrides(self) -> Map<String, Value> {
        let mut m = Map::new();
        match self {
            Preset::Table2 => {
                m.insert("n_pool_initial".into(), 100_000.into());
                m.insert("n_pool_increment".into(), 100_000.into());
                m.insert("cov_thr".into(), 0.015.into());
                m.insert("gamma".into(), 20.0.into());
            }
            Preset::Table3 => {
                m.insert("n_pool_initial".into(), 10_000.into());
                m.insert("n_pool_increment".into(), 10_000.into());
                m.insert("cov_thr".into(), 0.05.into());
            }
            Preset::Table4 | Preset::Table7 | Preset::Table10 => {
                m.insert("n_pool_initial".into(), 10_000.into());
                m.insert("n_pool_increment".into(), 10_000.into());
            }
        }
        m
    }

    fn repetitions(self) -> usize {
        match self {
            Preset::Table3 => 50,
            _ => 1,
        }
    }
}

/// One input variable of an external model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "lowercase", deny_unknown_fields)]
pub enum VariableSpec {
    Normal {
        #[serde(default)]
        name: Option<String>,
        mean: f64,
        sd: f64,
    },
    Uniform {
        #[serde(default)]
        name: Option<String>,
        lower: f64,
        upper: f64,
    },
    Gumbel {
        #[serde(default)]
        name: Option<String>,
        mean: f64,
        sd: f64,
    },
}

impl VariableSpec {
    fn name(&self) -> Option<&str> {
        match self {
            VariableSpec::Normal { name, .. } | VariableSpec::Uniform { name, .. } | VariableSpec::Gumbel { name, .. } => {
                name.as_deref()
            }
        }
    }

    fn marginal(&self) -> reak_core::Result<Marginal<f64>> {
        match *self {
            VariableSpec::Normal { mean, sd, .. } => Marginal::normal(mean, sd),
            VariableSpec::Uniform { lower, upper, .. } => Marginal::uniform(lower, upper),
            VariableSpec::Gumbel { mean, sd, .. } => Marginal::gumbel(mean, sd),
        }
    }
}

/// A limit state computed by a child process speaking the line protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalModel {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    pub variables: Vec<VariableSpec>,
}

impl ExternalModel {
    pub fn random_vector(&self) -> Result<RandomVector<f64>> {
        let marginals = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.marginal()
                    .map_err(|e| HarnessError::Config(format!("evaluator.variables[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let names = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| v.name().map_or_else(|| format!("x{}", i + 1), str::to_string))
            .collect();
        RandomVector::with_names(names, marginals).map_err(|e| HarnessError::Config(format!("evaluator.variables: {e}")))
    }
}

/// Where limit-state values come from.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Benchmark(BenchmarkKind),
    External(ExternalModel),
}

impl ModelSpec {
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Benchmark(k) => k.name().to_string(),
            ModelSpec::External(e) => format!("external:{}", e.command),
        }
    }
}

/// Keys handled by the harness; every other top-level key belongs to the
/// engine configuration.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarnessKeys {
    preset: Option<Preset>,
    benchmark: Option<String>,
    evaluator: Option<ExternalModel>,
    repetitions: Option<usize>,
    seeds: Option<Vec<u64>>,
    output_dir: Option<PathBuf>,
    methods: Option<Vec<Method>>,
    eps_thrs: Option<Vec<f64>>,
    oracle: Option<bool>,
}

const HARNESS_KEYS: [&str; 9] = [
    "preset",
    "benchmark",
    "evaluator",
    "repetitions",
    "seeds",
    "output_dir",
    "methods",
    "eps_thrs",
    "oracle",
];

/// A validated run configuration with every default applied.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub model: ModelSpec,
    pub engine: EngineConfig,
    /// Seed count of a sweep.
    pub repetitions: usize,
    /// Explicit sweep seeds; otherwise `seed, seed + 1, ...`.
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    /// Methods of a comparison table.
    pub methods: Vec<Method>,
    /// Error-rate thresholds of a comparison table.
    pub eps_thrs: Vec<f64>,
    /// Evaluate the true limit state on the final pool to report ε.
    pub oracle: bool,
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn deserialize<T: for<'de> Deserialize<'de>>(value: Value, what: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            config_err(format!("{what}: {}", e.inner()))
        } else {
            config_err(format!("key `{path}`: {}", e.inner()))
        }
    })
}

/// Overlays `top` on `base`, merging nested objects key by key.
fn merge(base: &mut Map<String, Value>, top: Map<String, Value>) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Object(b)), Value::Object(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Engine defaults for a benchmark: its standard pool and COV threshold, and a
/// call budget of ten times the reference AK-MCS mean.
fn benchmark_defaults(kind: BenchmarkKind) -> Map<String, Value> {
    let b = Benchmark::<f64>::new(kind);
    let (pool, inc) = b.default_pool();
    let mut m = Map::new();
    m.insert("n_pool_initial".into(), pool.into());
    m.insert("n_pool_increment".into(), inc.into());
    m.insert("cov_thr".into(), b.default_cov_thr().into());
    m.insert("max_calls".into(), ((10.0 * b.reference_ak_mcs_calls()).ceil() as usize).into());
    m
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(doc) = value else {
            return Err(config_err("the configuration must be a JSON object"));
        };
        let (harness, engine_keys): (Map<String, Value>, Map<String, Value>) =
            doc.into_iter().partition(|(k, _)| HARNESS_KEYS.contains(&k.as_str()));
        let keys: HarnessKeys = deserialize(Value::Object(harness), "harness keys")?;

        let model = match (&keys.preset, &keys.benchmark, &keys.evaluator) {
            (_, Some(_), Some(_)) | (Some(_), _, Some(_)) => {
                return Err(config_err("`evaluator` cannot be combined with `benchmark` or `preset`"));
            }
            (None, None, None) => {
                return Err(config_err("one of `benchmark`, `preset` or `evaluator` is required"));
            }
            (_, _, Some(ext)) => {
                if ext.variables.is_empty() {
                    return Err(config_err("key `evaluator.variables`: at least one variable is required"));
                }
                ModelSpec::External(ext.clone())
            }
            (preset, Some(name), None) => {
                let kind = BenchmarkKind::from_name(name).ok_or_else(|| {
                    let known: Vec<&str> = BenchmarkKind::ALL.iter().map(|k| k.name()).collect();
                    config_err(format!("key `benchmark`: unknown benchmark {name:?}, expected one of {known:?}"))
                })?;
                if let Some(p) = preset {
                    if p.benchmark() != kind {
                        return Err(config_err(format!(
                            "preset {} is defined for {}, not {}",
                            p.name(),
                            p.benchmark().name(),
                            kind.name()
                        )));
                    }
                }
                ModelSpec::Benchmark(kind)
            }
            (Some(p), None, None) => ModelSpec::Benchmark(p.benchmark()),
        };

        let Value::Object(mut engine) = serde_json::to_value(EngineConfig::default()).expect("serializable") else {
            unreachable!("engine configuration serializes to an object")
        };
        if let ModelSpec::Benchmark(kind) = &model {
            merge(&mut engine, benchmark_defaults(*kind));
        }
        if let Some(p) = keys.preset {
            merge(&mut engine, p.engine_overrides());
        }
        merge(&mut engine, engine_keys);
        let engine: EngineConfig = deserialize(Value::Object(engine), "engine settings")?;
        engine.validate().map_err(|e| match e {
            reak_core::Error::Config(msg) => config_err(msg),
            other => config_err(other.to_string()),
        })?;

        let repetitions = keys.repetitions.unwrap_or_else(|| keys.preset.map_or(1, Preset::repetitions));
        if repetitions == 0 {
            return Err(config_err("key `repetitions`: must be at least 1"));
        }
        if let Some(seeds) = &keys.seeds {
            check_distinct(seeds)?;
        }
        let eps_thrs = keys.eps_thrs.unwrap_or_else(|| vec![engine.eps_thr]);
        if let Some(bad) = eps_thrs.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(config_err(format!("key `eps_thrs`: {bad} outside (0, 1)")));
        }
        let methods = keys
            .methods
            .unwrap_or_else(|| vec![Method::AkMcs, Method::Iskra, Method::Reak]);
        if methods.is_empty() {
            return Err(config_err("key `methods`: at least one method is required"));
        }
        let oracle = keys.oracle.unwrap_or(matches!(model, ModelSpec::Benchmark(_)));
        Ok(Self {
            preset: keys.preset,
            model,
            engine,
            repetitions,
            seeds: keys.seeds,
            output_dir: keys.output_dir,
            methods,
            eps_thrs,
            oracle,
        })
    }

    /// The effective configuration as a document that parses back to `self`.
    pub fn to_value(&self) -> Value {
        let Value::Object(mut doc) = serde_json::to_value(&self.engine).expect("serializable") else {
            unreachable!("engine configuration serializes to an object")
        };
        if let Some(p) = self.preset {
            doc.insert("preset".into(), serde_json::to_value(p).expect("serializable"));
        }
        match &self.model {
            ModelSpec::Benchmark(k) => {
                doc.insert("benchmark".into(), k.name().into());
            }
            ModelSpec::External(e) => {
                doc.insert("evaluator".into(), serde_json::to_value(e).expect("serializable"));
            }
        }
        doc.insert("repetitions".into(), self.repetitions.into());
        if let Some(seeds) = &self.seeds {
            doc.insert("seeds".into(), serde_json::to_value(seeds).expect("serializable"));
        }
        if let Some(dir) = &self.output_dir {
            doc.insert("output_dir".into(), serde_json::to_value(dir).expect("serializable"));
        }
        doc.insert("methods".into(), serde_json::to_value(&self.methods).expect("serializable"));
        doc.insert("eps_thrs".into(), serde_json::to_value(&self.eps_thrs).expect("serializable"));
        doc.insert("oracle".into(), self.oracle.into());
        Value::Object(doc)
    }

    /// Seeds of a sweep of `reps` runs.
    pub fn sweep_seeds(&self, reps: usize) -> Result<Vec<u64>> {
        let seeds = match &self.seeds {
            Some(s) => s.iter().copied().take(reps).collect::<Vec<_>>(),
            None => (0..reps as u64).map(|i| self.engine.seed.wrapping_add(i)).collect(),
        };
        if seeds.len() < reps {
            return Err(config_err(format!("{reps} repetitions requested but only {} seeds listed", seeds.len())));
        }
        check_distinct(&seeds)?;
        Ok(seeds)
    }
}

/// Repeated seeds would silently duplicate runs in the statistics.
pub fn check_distinct(seeds: &[u64]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &s in seeds {
        if !seen.insert(s) {
            return Err(config_err(format!("seed {s} appears more than once; sweep seeds must be distinct")));
        }
    }
    Ok(())
}
