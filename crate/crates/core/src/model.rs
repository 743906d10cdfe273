//! Task and layer data model plus the closed-form cost model.
//!
//! Every function here is pure. Times are seconds, sizes are megabytes,
//! complexity is a floating-point operation count and power is watts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Processing tier, ordered by distance from the data source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Edge,
    Fog,
    Cloud,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Edge, Layer::Fog, Layer::Cloud];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Layer> {
        Layer::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Edge => "edge",
            Layer::Fog => "fog",
            Layer::Cloud => "cloud",
        }
    }

    /// Next tier away from the source, `None` for Cloud.
    pub fn outward(self) -> Option<Layer> {
        Layer::from_index(self.index() + 1)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(Layer::Edge),
            "fog" => Ok(Layer::Fog),
            "cloud" => Ok(Layer::Cloud),
            other => Err(ModelError::config("layer", format!("unknown layer `{other}`"))),
        }
    }
}

/// Workload-generator label. Policies never look at it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskCategory {
    Realtime,
    Aggregation,
    Analytics,
}

impl TaskCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskCategory::Realtime => "realtime",
            TaskCategory::Aggregation => "aggregation",
            TaskCategory::Analytics => "analytics",
        }
    }
}

pub type TaskId = u64;

/// One unit of offloadable work.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Task {
    id: TaskId,
    arrival_time: f64,
    latency_req: f64,
    complexity: f64,
    data_size: f64,
    privacy: bool,
    category: TaskCategory,
}

fn require_positive(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidTask {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl Task {
    /// Builds a task arriving at time zero. `data_size` is in megabytes.
    pub fn new(
        id: TaskId,
        latency_req: f64,
        complexity: f64,
        data_size: f64,
        privacy: bool,
    ) -> Result<Self, ModelError> {
        require_positive("latency_req", latency_req)?;
        require_positive("complexity", complexity)?;
        require_positive("data_size", data_size)?;
        Ok(Task {
            id,
            arrival_time: 0.0,
            latency_req,
            complexity,
            data_size,
            privacy,
            category: TaskCategory::Realtime,
        })
    }

    pub fn with_arrival(mut self, arrival_time: f64) -> Result<Self, ModelError> {
        if !(arrival_time.is_finite() && arrival_time >= 0.0) {
            return Err(ModelError::InvalidTask {
                field: "arrival_time",
                reason: format!("must be finite and >= 0, got {arrival_time}"),
            });
        }
        self.arrival_time = arrival_time;
        Ok(self)
    }

    pub fn with_category(mut self, category: TaskCategory) -> Self {
        self.category = category;
        self
    }

    pub fn id(&self) -> TaskId {
        self.id
    }
    pub fn arrival_time(&self) -> f64 {
        self.arrival_time
    }
    pub fn latency_req(&self) -> f64 {
        self.latency_req
    }
    pub fn complexity(&self) -> f64 {
        self.complexity
    }
    pub fn data_size(&self) -> f64 {
        self.data_size
    }
    pub fn is_sensitive(&self) -> bool {
        self.privacy
    }
    pub fn category(&self) -> TaskCategory {
        self.category
    }
}

/// The (latency, complexity, privacy) triple a policy sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub latency: f64,
    pub complexity: f64,
    pub privacy: u8,
}

/// Physical model of one tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub layer: Layer,
    /// FLOPs per second of a single node.
    pub proc_speed: f64,
    /// Aggregate FLOPs per second of the tier.
    pub capacity: f64,
    pub p_proc: f64,
    pub p_comm: f64,
    pub accuracy: f64,
    /// Inference constant on Edge, aggregation time on Fog. When absent on
    /// Fog it is `node_count * per_device_update_time`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_overhead: Option<f64>,
    #[serde(default = "one_usize")]
    pub node_count: usize,
    #[serde(default)]
    pub per_device_update_time: f64,
    #[serde(default)]
    pub base_rtt: f64,
    /// Megabits per second toward this tier.
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
    #[serde(default = "one_f64")]
    pub reliability: f64,
}

fn one_usize() -> usize {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn default_bandwidth() -> f64 {
    100.0
}

impl LayerSpec {
    /// A minimal valid spec with no overheads, no network cost and zero power.
    pub fn bare(layer: Layer, proc_speed: f64) -> Self {
        LayerSpec {
            layer,
            proc_speed,
            capacity: proc_speed,
            p_proc: 0.0,
            p_comm: 0.0,
            accuracy: 1.0,
            fixed_overhead: None,
            node_count: 1,
            per_device_update_time: 0.0,
            base_rtt: 0.0,
            bandwidth: default_bandwidth(),
            reliability: 1.0,
        }
    }

    /// Layer-fixed processing overhead in seconds.
    pub fn overhead(&self) -> f64 {
        match (self.fixed_overhead, self.layer) {
            (Some(t), _) => t,
            (None, Layer::Fog) => self.node_count as f64 * self.per_device_update_time,
            (None, _) => 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let layer = self.layer.as_str();
        let bad = |field: &'static str, reason: String| ModelError::InvalidLayerSpec { layer, field, reason };
        let finite_nonneg = |field: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(bad(field, format!("must be finite and >= 0, got {v}")))
            }
        };
        if !(self.proc_speed.is_finite() && self.proc_speed > 0.0) {
            return Err(bad("proc_speed", format!("must be > 0, got {}", self.proc_speed)));
        }
        if !(self.capacity.is_finite() && self.capacity >= self.proc_speed) {
            return Err(bad(
                "capacity",
                format!("must be >= proc_speed ({}), got {}", self.proc_speed, self.capacity),
            ));
        }
        finite_nonneg("p_proc", self.p_proc)?;
        finite_nonneg("p_comm", self.p_comm)?;
        if !(0.0..=1.0).contains(&self.accuracy) {
            return Err(bad("accuracy", format!("must lie in [0, 1], got {}", self.accuracy)));
        }
        if let Some(t) = self.fixed_overhead {
            finite_nonneg("fixed_overhead", t)?;
        }
        if self.node_count == 0 {
            return Err(bad("node_count", "must be >= 1".into()));
        }
        finite_nonneg("per_device_update_time", self.per_device_update_time)?;
        finite_nonneg("base_rtt", self.base_rtt)?;
        if self.layer == Layer::Edge && self.base_rtt != 0.0 {
            return Err(bad("base_rtt", "must be 0 for the edge layer".into()));
        }
        if self.layer != Layer::Edge && !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(bad("bandwidth", format!("must be > 0, got {}", self.bandwidth)));
        }
        if !(self.reliability.is_finite() && self.reliability > 0.0) {
            return Err(bad("reliability", format!("must be > 0, got {}", self.reliability)));
        }
        Ok(())
    }

    /// Stricter check for specs feeding the reward: energy must stay positive.
    pub fn validate_for_reward(&self) -> Result<(), ModelError> {
        self.validate()?;
        if self.p_proc <= 0.0 {
            return Err(ModelError::InvalidLayerSpec {
                layer: self.layer.as_str(),
                field: "p_proc",
                reason: "must be > 0 when used for rewards (zero energy signals a misconfigured power model)".into(),
            });
        }
        Ok(())
    }
}

/// The three tier specs, indexed by [`Layer`].
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSet([LayerSpec; 3]);

impl LayerSet {
    pub fn new(edge: LayerSpec, fog: LayerSpec, cloud: LayerSpec) -> Result<Self, ModelError> {
        let set = LayerSet([edge, fog, cloud]);
        for (layer, spec) in Layer::ALL.iter().zip(set.0.iter()) {
            if spec.layer != *layer {
                return Err(ModelError::config(
                    format!("layers.{layer}.layer"),
                    format!("expected `{layer}`, got `{}`", spec.layer),
                ));
            }
            spec.validate()?;
        }
        Ok(set)
    }

    pub fn get(&self, layer: Layer) -> &LayerSpec {
        &self.0[layer.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LayerSpec> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityWeights {
    pub latency: f64,
    pub capacity: f64,
    pub privacy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub latency: f64,
    pub energy: f64,
    pub accuracy: f64,
}

/// Weights for the placement utility and the training reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub utility: UtilityWeights,
    pub reward: RewardWeights,
    /// Additive privacy term on the reward. Zero gives the plain
    /// latency/energy/accuracy reward.
    #[serde(default = "default_privacy_bonus")]
    pub reward_privacy_bonus: f64,
}

fn default_privacy_bonus() -> f64 {
    0.3
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            utility: UtilityWeights {
                latency: 0.6,
                capacity: 0.0001,
                privacy: 0.3999,
            },
            reward: RewardWeights {
                latency: 0.4,
                energy: 0.3,
                accuracy: 0.3,
            },
            reward_privacy_bonus: default_privacy_bonus(),
        }
    }
}

impl WeightConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let groups = [
            (
                "weights.utility",
                [self.utility.latency, self.utility.capacity, self.utility.privacy],
            ),
            (
                "weights.reward",
                [self.reward.latency, self.reward.energy, self.reward.accuracy],
            ),
        ];
        for (name, ws) in groups {
            if ws.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(ModelError::config(name, "weights must be finite and >= 0"));
            }
            let sum: f64 = ws.iter().sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(ModelError::config(name, format!("weights must sum to 1, got {sum}")));
            }
        }
        if !(self.reward_privacy_bonus.is_finite() && self.reward_privacy_bonus >= 0.0) {
            return Err(ModelError::config(
                "weights.reward_privacy_bonus",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }
}

/// Encryption cost: `alpha` seconds per megabyte plus `beta` setup seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncryptionParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for EncryptionParams {
    fn default() -> Self {
        EncryptionParams {
            alpha: 0.01,
            beta: 0.005,
        }
    }
}

impl EncryptionParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [("encryption.alpha", self.alpha), ("encryption.beta", self.beta)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::config(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Cut-offs for the threshold pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    /// Seconds; tasks tighter than this run on the edge.
    pub low_latency: f64,
    /// FLOPs; remaining tasks lighter than this run on fog.
    pub moderate_complexity: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            low_latency: 0.1,
            moderate_complexity: 1e6,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [
            ("thresholds.low_latency", self.low_latency),
            ("thresholds.moderate_complexity", self.moderate_complexity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::config(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn analyze_task(task: &Task) -> FeatureVector {
    FeatureVector {
        latency: task.latency_req,
        complexity: task.complexity,
        privacy: u8::from(task.privacy),
    }
}

/// Computation time plus the tier's fixed overhead. Network time is not
/// included here; see [`comm_time`].
pub fn proc_time(task: &Task, spec: &LayerSpec) -> f64 {
    task.complexity / spec.proc_speed + spec.overhead()
}

/// Round trip plus serialization delay; always zero on the edge.
pub fn comm_time(task: &Task, spec: &LayerSpec) -> f64 {
    match spec.layer {
        Layer::Edge => 0.0,
        _ => spec.base_rtt + task.data_size * 8.0 / spec.bandwidth,
    }
}

pub fn predicted_latency(task: &Task, spec: &LayerSpec) -> f64 {
    proc_time(task, spec) + comm_time(task, spec)
}

pub fn privacy_score(task: &Task, layer: Layer) -> f64 {
    match (task.privacy, layer) {
        (true, Layer::Edge) => 1.0,
        (true, Layer::Fog) => 0.5,
        _ => 0.0,
    }
}

/// Placement utility: inverse latency, capacity fit and privacy, weighted.
pub fn utility(task: &Task, spec: &LayerSpec, w: &WeightConfig) -> f64 {
    let u = &w.utility;
    u.latency / predicted_latency(task, spec)
        + u.capacity * spec.capacity / task.complexity
        + u.privacy * privacy_score(task, spec.layer)
}

/// Index of the largest score; ties go to the lowest index (closest to source).
pub fn argmax_toward_source(scores: &[f64; 3]) -> Layer {
    let mut best = 0;
    for i in 1..3 {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Layer::ALL[best]
}

pub fn layer_utilities(task: &Task, layers: &LayerSet, w: &WeightConfig) -> [f64; 3] {
    Layer::ALL.map(|l| utility(task, layers.get(l), w))
}

pub fn select_layer(task: &Task, layers: &LayerSet, w: &WeightConfig) -> Layer {
    argmax_toward_source(&layer_utilities(task, layers, w))
}

pub fn enc_time(task: &Task, ep: &EncryptionParams) -> f64 {
    if task.privacy {
        ep.alpha * task.data_size + ep.beta
    } else {
        0.0
    }
}

pub fn total_time(task: &Task, spec: &LayerSpec, ep: &EncryptionParams) -> f64 {
    predicted_latency(task, spec) + enc_time(task, ep)
}

/// Joules spent computing and transmitting.
pub fn energy(task: &Task, spec: &LayerSpec) -> f64 {
    spec.p_proc * proc_time(task, spec) + spec.p_comm * comm_time(task, spec)
}

/// Reward from already-realized quantities. `latency` and `energy` must be > 0.
pub fn reward_from_outcome(latency: f64, energy: f64, accuracy: f64, privacy_score: f64, w: &WeightConfig) -> f64 {
    let r = &w.reward;
    r.latency / latency + r.energy / energy + r.accuracy * accuracy + w.reward_privacy_bonus * privacy_score
}

/// Modeled reward of placing `task` on `spec`'s tier. The latency term uses
/// the encryption-inclusive total time. `spec` must pass
/// [`LayerSpec::validate_for_reward`].
pub fn reward(task: &Task, spec: &LayerSpec, w: &WeightConfig, ep: &EncryptionParams) -> f64 {
    reward_from_outcome(
        total_time(task, spec, ep),
        energy(task, spec),
        spec.accuracy,
        privacy_score(task, spec.layer),
        w,
    )
}

pub fn layer_rewards(task: &Task, layers: &LayerSet, w: &WeightConfig, ep: &EncryptionParams) -> [f64; 3] {
    Layer::ALL.map(|l| reward(task, layers.get(l), w, ep))
}

/// Reliability-weighted combination of per-node results.
pub fn aggregate_results(values: &[f64], reliabilities: &[f64]) -> Result<f64, ModelError> {
    if values.is_empty() {
        return Err(ModelError::MalformedNodeSet("no results to aggregate".into()));
    }
    if values.len() != reliabilities.len() {
        return Err(ModelError::MalformedNodeSet(format!(
            "{} results but {} reliabilities",
            values.len(),
            reliabilities.len()
        )));
    }
    if let Some(r) = reliabilities.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(ModelError::MalformedNodeSet(format!(
            "reliability must be > 0, got {r}"
        )));
    }
    let total: f64 = reliabilities.iter().sum();
    Ok(values.iter().zip(reliabilities).map(|(v, r)| (r / total) * v).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn task(l: f64, c: f64, d: f64, p: bool) -> Task {
        Task::new(1, l, c, d, p).unwrap()
    }

    fn edge() -> LayerSpec {
        LayerSpec {
            fixed_overhead: Some(0.01),
            p_proc: 0.1,
            accuracy: 0.85,
            ..LayerSpec::bare(Layer::Edge, 1e8)
        }
    }

    fn fog() -> LayerSpec {
        LayerSpec {
            node_count: 10,
            per_device_update_time: 0.002,
            base_rtt: 0.005,
            bandwidth: 80.0,
            ..LayerSpec::bare(Layer::Fog, 1e10)
        }
    }

    #[test]
    fn task_rejects_degenerate_fields() {
        assert!(Task::new(0, 0.0, 1.0, 1.0, false).is_err());
        assert!(Task::new(0, 1.0, 0.0, 1.0, false).is_err());
        assert!(Task::new(0, 1.0, 1.0, 0.0, false).is_err());
        assert!(Task::new(0, f64::NAN, 1.0, 1.0, false).is_err());
        assert!(Task::new(0, 1.0, 1.0, 1.0, false).unwrap().with_arrival(-1.0).is_err());
    }

    #[test]
    fn analyze_is_projection() {
        let fv = analyze_task(&task(0.1, 1e6, 1.0, true));
        assert_eq!(
            fv,
            FeatureVector {
                latency: 0.1,
                complexity: 1e6,
                privacy: 1
            }
        );
        let fv = analyze_task(&task(0.005, 1e4, 1.0, false));
        assert_eq!(
            fv,
            FeatureVector {
                latency: 0.005,
                complexity: 1e4,
                privacy: 0
            }
        );
    }

    #[test]
    fn proc_time_examples() {
        assert_relative_eq!(
            proc_time(&task(1.0, 1e6, 1.0, false), &edge()),
            0.02,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            proc_time(&task(1.0, 1e8, 1.0, false), &fog()),
            0.03,
            max_relative = 1e-12
        );
        let tiny = task(1.0, f64::MIN_POSITIVE, 1.0, false);
        assert!(proc_time(&tiny, &edge()) >= 0.01);
    }

    #[test]
    fn explicit_overhead_wins_over_update_sum() {
        let spec = LayerSpec {
            fixed_overhead: Some(0.5),
            ..fog()
        };
        assert_eq!(spec.overhead(), 0.5);
        assert_relative_eq!(fog().overhead(), 0.02, max_relative = 1e-12);
        assert_eq!(LayerSpec::bare(Layer::Cloud, 1.0).overhead(), 0.0);
    }

    #[test]
    fn comm_and_latency_examples() {
        let t = task(1.0, 1e8, 1.0, false);
        assert_eq!(comm_time(&t, &edge()), 0.0);
        assert_relative_eq!(comm_time(&t, &fog()), 0.105, max_relative = 1e-12);
        let cloud = LayerSpec {
            base_rtt: 0.05,
            bandwidth: 80.0,
            ..LayerSpec::bare(Layer::Cloud, 1e10)
        };
        assert_relative_eq!(comm_time(&t, &cloud), 0.150, max_relative = 1e-12);
        assert_relative_eq!(predicted_latency(&t, &fog()), 0.135, max_relative = 1e-12);
        let t = task(1.0, 1e6, 1.0, false);
        assert_relative_eq!(predicted_latency(&t, &edge()), 0.02, max_relative = 1e-12);
    }

    #[test]
    fn privacy_table() {
        let s = task(1.0, 1.0, 1.0, true);
        let n = task(1.0, 1.0, 1.0, false);
        assert_eq!(privacy_score(&s, Layer::Edge), 1.0);
        assert_eq!(privacy_score(&s, Layer::Fog), 0.5);
        assert_eq!(privacy_score(&s, Layer::Cloud), 0.0);
        for l in Layer::ALL {
            assert_eq!(privacy_score(&n, l), 0.0);
        }
    }

    #[test]
    fn encryption_and_total_time() {
        let ep = EncryptionParams::default();
        assert_relative_eq!(enc_time(&task(1.0, 1.0, 10.0, true), &ep), 0.105, max_relative = 1e-12);
        assert_eq!(enc_time(&task(1.0, 1.0, 10.0, false), &ep), 0.0);
        assert!(enc_time(&task(1.0, 1.0, f64::MIN_POSITIVE, true), &ep) >= ep.beta);
        let t = task(1.0, 1e8, 1.0, true);
        assert_relative_eq!(total_time(&t, &fog(), &ep), 0.150, max_relative = 1e-12);
        let t = task(1.0, 1e8, 1.0, false);
        assert_eq!(total_time(&t, &fog(), &ep), predicted_latency(&t, &fog()));
    }

    #[test]
    fn energy_examples() {
        assert_relative_eq!(
            energy(&task(1.0, 1e6, 1.0, false), &edge()),
            0.002,
            max_relative = 1e-12
        );
        let cloud = LayerSpec {
            p_proc: 100.0,
            p_comm: 5.0,
            base_rtt: 0.05,
            bandwidth: 80.0,
            ..LayerSpec::bare(Layer::Cloud, 1e10)
        };
        // proc 1e8 / 1e10 = 0.01 s, comm 0.15 s
        assert_relative_eq!(energy(&task(1.0, 1e8, 1.0, false), &cloud), 1.75, max_relative = 1e-12);
        assert_eq!(energy(&task(1.0, 1e8, 1.0, false), &fog()), 0.0);
    }

    #[test]
    fn reward_example() {
        let w = WeightConfig {
            reward_privacy_bonus: 0.0,
            ..WeightConfig::default()
        };
        // edge(): L = 0.02, E = 0.002, A = 0.85
        let r = reward(&task(1.0, 1e6, 1.0, false), &edge(), &w, &EncryptionParams::default());
        assert_relative_eq!(r, 170.255, max_relative = 1e-12);
    }

    #[test]
    fn reward_bonus_only_for_sensitive_local() {
        let w = WeightConfig::default();
        let ep = EncryptionParams::default();
        let s = task(1.0, 1e6, 1.0, true);
        let base = WeightConfig {
            reward_privacy_bonus: 0.0,
            ..w
        };
        let diff = reward(&s, &edge(), &w, &ep) - reward(&s, &edge(), &base, &ep);
        assert_relative_eq!(diff, 0.3, max_relative = 1e-9);
    }

    #[test]
    fn argmax_ties_go_toward_source() {
        assert_eq!(argmax_toward_source(&[2.0, 1.0, 0.5]), Layer::Edge);
        assert_eq!(argmax_toward_source(&[1.0, 1.0, 0.2]), Layer::Edge);
        assert_eq!(argmax_toward_source(&[0.0, 1.0, 1.0]), Layer::Fog);
        assert_eq!(argmax_toward_source(&[0.0, 1.0, 3.0]), Layer::Cloud);
    }

    #[test]
    fn aggregation_examples_and_errors() {
        assert_relative_eq!(aggregate_results(&[2.0, 4.0, 6.0], &[1.0; 3]).unwrap(), 4.0);
        assert_eq!(aggregate_results(&[7.5], &[0.3]).unwrap(), 7.5);
        assert_relative_eq!(
            aggregate_results(&[1.0, 3.0], &[1.0, 3.0]).unwrap(),
            2.5,
            max_relative = 1e-12
        );
        assert!(aggregate_results(&[], &[]).is_err());
        assert!(aggregate_results(&[1.0], &[0.0]).is_err());
        assert!(aggregate_results(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(edge().validate().is_ok());
        assert!(LayerSpec {
            base_rtt: 0.01,
            ..edge()
        }
        .validate()
        .is_err());
        assert!(LayerSpec {
            capacity: 1.0,
            ..edge()
        }
        .validate()
        .is_err());
        assert!(LayerSpec {
            accuracy: 1.5,
            ..edge()
        }
        .validate()
        .is_err());
        assert!(LayerSpec { node_count: 0, ..fog() }.validate().is_err());
        assert!(fog().validate_for_reward().is_err());
        assert!(LayerSet::new(fog(), fog(), fog()).is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(WeightConfig::default().validate().is_ok());
        let mut w = WeightConfig::default();
        w.reward.latency = 0.5;
        assert!(w.validate().is_err());
        let mut w = WeightConfig::default();
        w.utility.privacy = -0.1;
        assert!(w.validate().is_err());
    }
}
