use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SimError};
use crate::model::{EncryptionParams, Layer, LayerSet, LayerSpec, ThresholdConfig, WeightConfig};
use crate::policy::PolicyConfig;
use crate::rl::{AgentConfig, Bounds, NormBounds};

/// The scenario file shipped with the crate.
pub const SMART_CITY_JSON: &str = include_str!("../../scenarios/smart-city.json");

const PROPORTION_TOLERANCE: f64 = 1e-9;

/// Probability of each of the three bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandMix {
    pub low: f64,
    pub moderate: f64,
    pub high: f64,
}

/// Half-open `[min, max)` ranges for each band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandRanges {
    pub low: [f64; 2],
    pub moderate: [f64; 2],
    pub high: [f64; 2],
}

impl BandRanges {
    pub fn get(&self, band: Band) -> [f64; 2] {
        match band {
            Band::Low => self.low,
            Band::Moderate => self.moderate,
            Band::High => self.high,
        }
    }

    pub fn span(&self) -> Bounds {
        let all = [self.low, self.moderate, self.high];
        Bounds::new(
            all.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min),
            all.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Low,
    Moderate,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    Uniform,
    LogUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeUnit {
    Kb,
    Mb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSizeRange {
    pub min: f64,
    pub max: f64,
    pub unit: SizeUnit,
}

impl DataSizeRange {
    /// Bounds in megabytes (1 MB = 1000 KB).
    pub fn in_mb(&self) -> Bounds {
        let k = match self.unit {
            SizeUnit::Kb => 1e-3,
            SizeUnit::Mb => 1.0,
        };
        Bounds::new(self.min * k, self.max * k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskMix {
    pub latency: BandMix,
    pub complexity: BandMix,
    /// Seconds.
    pub latency_bands: BandRanges,
    /// FLOPs.
    pub complexity_bands: BandRanges,
    pub latency_sampling: Sampling,
    pub complexity_sampling: Sampling,
    pub data_size: DataSizeRange,
    pub privacy_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub spec: LayerSpec,
    /// Node instances in the pool; the edge defaults to `device_count`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    /// Tasks a node may hold, in service plus waiting.
    pub queue_capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfigs {
    pub edge: LayerConfig,
    pub fog: LayerConfig,
    pub cloud: LayerConfig,
}

impl LayerConfigs {
    pub fn get(&self, layer: Layer) -> &LayerConfig {
        match layer {
            Layer::Edge => &self.edge,
            Layer::Fog => &self.fog,
            Layer::Cloud => &self.cloud,
        }
    }
}

/// A complete, reproducible experiment definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    /// Virtual seconds.
    pub duration: f64,
    pub device_count: usize,
    /// Informational; arrivals are driven by `task_count`.
    pub sensor_count: usize,
    pub task_count: usize,
    pub mix: TaskMix,
    pub layers: LayerConfigs,
    pub thresholds: ThresholdConfig,
    pub weights: WeightConfig,
    pub encryption: EncryptionParams,
    pub overload_threshold: f64,
    /// FLOPs above which the fog-centric baseline uses the cloud.
    pub fog_high_complexity: f64,
    /// Fraction of an aggregation task's payload removed at fog before it
    /// continues to the cloud.
    pub fog_summarization: f64,
    /// When true a full cloud drops tasks instead of queueing without bound.
    pub cloud_rejects: bool,
    /// Joules an edge device holds when fully charged.
    pub battery_capacity: f64,
    pub seed: u64,
    pub replications: usize,
    #[serde(default)]
    pub training: AgentConfig,
    /// Upper bound of the queue-utilization features drawn while training.
    #[serde(default = "default_training_load")]
    pub training_load: f64,
}

fn default_training_load() -> f64 {
    0.2
}

impl ScenarioSpec {
    pub fn smart_city() -> Self {
        Self::from_json(SMART_CITY_JSON).expect("bundled scenario is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let spec: ScenarioSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, SimError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn layer_set(&self) -> Result<LayerSet, ModelError> {
        LayerSet::new(
            self.layers.edge.spec.clone(),
            self.layers.fog.spec.clone(),
            self.layers.cloud.spec.clone(),
        )
    }

    pub fn pool_size(&self, layer: Layer) -> usize {
        let cfg = self.layers.get(layer);
        match (cfg.pool_size, layer) {
            (Some(n), _) => n,
            (None, Layer::Edge) => self.device_count,
            (None, _) => 1,
        }
    }

    pub fn policy_config(&self) -> Result<PolicyConfig, ModelError> {
        Ok(PolicyConfig {
            layers: self.layer_set()?,
            weights: self.weights,
            thresholds: self.thresholds,
            fog_high_complexity: self.fog_high_complexity,
            overload_threshold: self.overload_threshold,
        })
    }

    pub fn norm_bounds(&self) -> NormBounds {
        NormBounds {
            latency: self.mix.latency_bands.span(),
            complexity: self.mix.complexity_bands.span(),
            data_size: self.mix.data_size.in_mb(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ModelError::config(field, format!("must be > 0, got {v}")))
            }
        };
        positive("duration", self.duration)?;
        if self.task_count == 0 {
            return Err(ModelError::config("task_count", "must be >= 1"));
        }
        if self.device_count == 0 {
            return Err(ModelError::config("device_count", "must be >= 1"));
        }
        if self.replications == 0 {
            return Err(ModelError::config("replications", "must be >= 1"));
        }
        for (name, mix) in [
            ("mix.latency", &self.mix.latency),
            ("mix.complexity", &self.mix.complexity),
        ] {
            let ps = [mix.low, mix.moderate, mix.high];
            if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(ModelError::config(name, "proportions must lie in [0, 1]"));
            }
            let sum: f64 = ps.iter().sum();
            if (sum - 1.0).abs() > PROPORTION_TOLERANCE {
                return Err(ModelError::config(
                    name,
                    format!("proportions must sum to 1, got {sum}"),
                ));
            }
        }
        for (name, bands) in [
            ("mix.latency_bands", &self.mix.latency_bands),
            ("mix.complexity_bands", &self.mix.complexity_bands),
        ] {
            for r in [bands.low, bands.moderate, bands.high] {
                if !(r[0].is_finite() && r[1].is_finite() && r[0] > 0.0 && r[0] <= r[1]) {
                    return Err(ModelError::config(
                        name,
                        format!("band {r:?} must satisfy 0 < min <= max"),
                    ));
                }
            }
        }
        let d = &self.mix.data_size;
        if !(d.min.is_finite() && d.max.is_finite() && d.min > 0.0 && d.min <= d.max) {
            return Err(ModelError::config("mix.data_size", "must satisfy 0 < min <= max"));
        }
        if !(0.0..=1.0).contains(&self.mix.privacy_probability) {
            return Err(ModelError::config("mix.privacy_probability", "must lie in [0, 1]"));
        }
        let layers = self.layer_set()?;
        for spec in layers.iter() {
            spec.validate_for_reward()?;
        }
        for layer in Layer::ALL {
            let cfg = self.layers.get(layer);
            if cfg.queue_capacity == 0 {
                return Err(ModelError::config(
                    format!("layers.{layer}.queue_capacity"),
                    "must be >= 1",
                ));
            }
            if self.pool_size(layer) == 0 {
                return Err(ModelError::config(format!("layers.{layer}.pool_size"), "must be >= 1"));
            }
        }
        self.encryption.validate()?;
        self.policy_config()?.validate()?;
        if !(0.0..=1.0).contains(&self.fog_summarization) {
            return Err(ModelError::config("fog_summarization", "must lie in [0, 1]"));
        }
        positive("battery_capacity", self.battery_capacity)?;
        if !(0.0..=1.0).contains(&self.training_load) {
            return Err(ModelError::config("training_load", "must lie in [0, 1]"));
        }
        Ok(())
    }
}
