//! Orchestration policies behind a single decision interface.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, PolicyError};
use crate::model::{
    argmax_toward_source, layer_utilities, predicted_latency, Layer, LayerSet, Task, TaskId, ThresholdConfig,
    WeightConfig,
};
use crate::rl::TrainedAgent;

/// Static-policy latency bands, in seconds.
pub const STATIC_EDGE_BELOW: f64 = 0.010;
pub const STATIC_FOG_UP_TO: f64 = 0.100;

/// What the orchestrator observes when a task arrives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemState {
    /// Occupied fraction of each layer's queue slots, indexed by [`Layer`].
    pub queue_utilization: [f64; 3],
    pub network_rtt: [f64; 3],
    /// Remaining charge of each edge device in [0, 1].
    pub battery: Vec<f64>,
}

impl SystemState {
    pub fn idle() -> Self {
        SystemState {
            queue_utilization: [0.0; 3],
            network_rtt: [0.0; 3],
            battery: Vec::new(),
        }
    }

    pub fn utilization(&self, layer: Layer) -> f64 {
        self.queue_utilization[layer.index()]
    }

    pub fn is_valid(&self) -> bool {
        let unit = |v: &f64| (0.0..=1.0).contains(v);
        self.queue_utilization.iter().all(unit)
            && self.battery.iter().all(unit)
            && self.network_rtt.iter().all(|r| r.is_finite() && *r >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub task_id: TaskId,
    pub layer: Layer,
    pub rerouted: bool,
    pub predicted_latency: f64,
    pub utility: Option<f64>,
    pub q_values: Option<[f64; 3]>,
}

impl Decision {
    fn plain(task: &Task, layer: Layer, layers: &LayerSet) -> Self {
        Decision {
            task_id: task.id(),
            layer,
            rerouted: false,
            predicted_latency: predicted_latency(task, layers.get(layer)),
            utility: None,
            q_values: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "threshold-hipa")]
    ThresholdHipa,
    #[serde(rename = "greedy-utility")]
    GreedyUtility,
    #[serde(rename = "rl-hipa")]
    RlHipa,
    #[serde(rename = "cloud-only")]
    CloudOnly,
    #[serde(rename = "static")]
    StaticOrchestration,
    #[serde(rename = "fog-centric")]
    FogCentric,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::ThresholdHipa,
        PolicyKind::GreedyUtility,
        PolicyKind::RlHipa,
        PolicyKind::CloudOnly,
        PolicyKind::StaticOrchestration,
        PolicyKind::FogCentric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::ThresholdHipa => "threshold-hipa",
            PolicyKind::GreedyUtility => "greedy-utility",
            PolicyKind::RlHipa => "rl-hipa",
            PolicyKind::CloudOnly => "cloud-only",
            PolicyKind::StaticOrchestration => "static",
            PolicyKind::FogCentric => "fog-centric",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| PolicyError::UnknownPolicy(s.to_string()))
    }
}

/// Fig.-2 style pipeline: tight latency goes to the edge, light work to fog,
/// everything else to the cloud.
pub fn decide_threshold(task: &Task, tc: &ThresholdConfig, layers: &LayerSet) -> Decision {
    let layer = if task.latency_req() < tc.low_latency {
        Layer::Edge
    } else if task.complexity() < tc.moderate_complexity {
        Layer::Fog
    } else {
        Layer::Cloud
    };
    Decision::plain(task, layer, layers)
}

/// Fixed latency bands: below 10 ms edge, up to 100 ms fog, above that cloud.
pub fn decide_static(task: &Task, layers: &LayerSet) -> Decision {
    let l = task.latency_req();
    let layer = if l < STATIC_EDGE_BELOW {
        Layer::Edge
    } else if l <= STATIC_FOG_UP_TO {
        Layer::Fog
    } else {
        Layer::Cloud
    };
    Decision::plain(task, layer, layers)
}

/// Fog for everything except very heavy tasks. Never picks the edge.
pub fn decide_fog_centric(task: &Task, high_complexity: f64, layers: &LayerSet) -> Decision {
    let layer = if task.complexity() > high_complexity {
        Layer::Cloud
    } else {
        Layer::Fog
    };
    Decision::plain(task, layer, layers)
}

pub fn decide_cloud_only(task: &Task, layers: &LayerSet) -> Decision {
    Decision::plain(task, Layer::Cloud, layers)
}

/// Utility-argmax placement.
pub fn decide_greedy(task: &Task, layers: &LayerSet, w: &WeightConfig) -> Decision {
    let utilities = layer_utilities(task, layers, w);
    let layer = argmax_toward_source(&utilities);
    Decision {
        utility: Some(utilities[layer.index()]),
        ..Decision::plain(task, layer, layers)
    }
}

/// Moves a decision outward when its layer is over `threshold`: to the first
/// outer layer at or below the threshold, with Cloud as the unconditional
/// sink. Spreading over peers inside a layer is the dispatcher's job.
pub fn reroute_on_overload(
    decision: Decision,
    task: &Task,
    state: &SystemState,
    threshold: f64,
    layers: &LayerSet,
) -> Decision {
    if state.utilization(decision.layer) <= threshold {
        return decision;
    }
    let mut layer = decision.layer;
    while let Some(next) = layer.outward() {
        layer = next;
        if layer == Layer::Cloud || state.utilization(layer) <= threshold {
            break;
        }
    }
    if layer == decision.layer {
        // already at the sink
        return decision;
    }
    Decision {
        layer,
        rerouted: true,
        predicted_latency: predicted_latency(task, layers.get(layer)),
        utility: None,
        ..decision
    }
}

/// Everything the non-learned policies need.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub layers: LayerSet,
    pub weights: WeightConfig,
    pub thresholds: ThresholdConfig,
    /// FLOPs above which the fog-centric baseline escalates to the cloud.
    pub fog_high_complexity: f64,
    pub overload_threshold: f64,
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.weights.validate()?;
        self.thresholds.validate()?;
        if !(self.fog_high_complexity.is_finite() && self.fog_high_complexity > 0.0) {
            return Err(ModelError::config("fog_high_complexity", "must be > 0"));
        }
        if !(self.overload_threshold > 0.0 && self.overload_threshold <= 1.0) {
            return Err(ModelError::config(
                "overload_threshold",
                format!("must lie in (0, 1], got {}", self.overload_threshold),
            ));
        }
        Ok(())
    }
}

/// A policy bound to its configuration (and, for `rl-hipa`, a trained agent).
#[derive(Debug, Clone)]
pub struct Orchestrator {
    kind: PolicyKind,
    config: PolicyConfig,
    agent: Option<Arc<TrainedAgent>>,
}

impl Orchestrator {
    pub fn new(kind: PolicyKind, config: PolicyConfig, agent: Option<Arc<TrainedAgent>>) -> Result<Self, PolicyError> {
        config.validate()?;
        if kind == PolicyKind::RlHipa && agent.is_none() {
            return Err(PolicyError::MissingAgent);
        }
        Ok(Orchestrator { kind, config, agent })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn decide(&self, task: &Task, state: &SystemState) -> Decision {
        let c = &self.config;
        match self.kind {
            PolicyKind::ThresholdHipa => decide_threshold(task, &c.thresholds, &c.layers),
            PolicyKind::GreedyUtility => decide_greedy(task, &c.layers, &c.weights),
            PolicyKind::CloudOnly => decide_cloud_only(task, &c.layers),
            PolicyKind::StaticOrchestration => decide_static(task, &c.layers),
            PolicyKind::FogCentric => decide_fog_centric(task, c.fog_high_complexity, &c.layers),
            PolicyKind::RlHipa => {
                let agent = self.agent.as_ref().expect("checked in Orchestrator::new");
                let (layer, q) = agent.greedy(task, state);
                Decision {
                    q_values: Some(q),
                    ..Decision::plain(task, layer, &c.layers)
                }
            }
        }
    }

    /// Decision followed by overload rerouting.
    pub fn place(&self, task: &Task, state: &SystemState) -> Decision {
        let d = self.decide(task, state);
        reroute_on_overload(d, task, state, self.config.overload_threshold, &self.config.layers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LayerSpec;

    fn layers() -> LayerSet {
        LayerSet::new(
            LayerSpec::bare(Layer::Edge, 1e8),
            LayerSpec {
                base_rtt: 0.005,
                ..LayerSpec::bare(Layer::Fog, 1e9)
            },
            LayerSpec {
                base_rtt: 0.05,
                ..LayerSpec::bare(Layer::Cloud, 1e10)
            },
        )
        .unwrap()
    }

    fn task(l: f64, c: f64) -> Task {
        Task::new(3, l, c, 0.01, false).unwrap()
    }

    fn state(util: [f64; 3]) -> SystemState {
        SystemState {
            queue_utilization: util,
            ..SystemState::idle()
        }
    }

    #[test]
    fn threshold_branches() {
        let tc = ThresholdConfig::default();
        let ls = layers();
        assert_eq!(decide_threshold(&task(0.005, 1e9), &tc, &ls).layer, Layer::Edge);
        assert_eq!(decide_threshold(&task(0.5, 1e5), &tc, &ls).layer, Layer::Fog);
        assert_eq!(decide_threshold(&task(0.5, 1e9), &tc, &ls).layer, Layer::Cloud);
    }

    #[test]
    fn threshold_grid_matches_branch_table() {
        let tc = ThresholdConfig::default();
        let ls = layers();
        let latencies = [0.005, 0.05, 0.5];
        let complexities = [1e5, 1e7, 1e9];
        for l in latencies {
            for c in complexities {
                let expected = if l < 0.1 {
                    Layer::Edge
                } else if c < 1e6 {
                    Layer::Fog
                } else {
                    Layer::Cloud
                };
                assert_eq!(decide_threshold(&task(l, c), &tc, &ls).layer, expected, "L={l} C={c}");
            }
        }
    }

    #[test]
    fn static_bands() {
        let ls = layers();
        assert_eq!(decide_static(&task(0.005, 1.0), &ls).layer, Layer::Edge);
        assert_eq!(decide_static(&task(0.010, 1.0), &ls).layer, Layer::Fog);
        assert_eq!(decide_static(&task(0.05, 1.0), &ls).layer, Layer::Fog);
        assert_eq!(decide_static(&task(0.100, 1.0), &ls).layer, Layer::Fog);
        assert_eq!(decide_static(&task(0.5, 1.0), &ls).layer, Layer::Cloud);
    }

    #[test]
    fn fog_centric_and_cloud_only() {
        let ls = layers();
        assert_eq!(decide_fog_centric(&task(0.001, 1e6), 1e8, &ls).layer, Layer::Fog);
        assert_eq!(decide_fog_centric(&task(0.001, 1e9), 1e8, &ls).layer, Layer::Cloud);
        assert_eq!(decide_cloud_only(&task(0.001, 1.0), &ls).layer, Layer::Cloud);
        let sensitive = Task::new(1, 0.001, 1.0, 0.01, true).unwrap();
        assert_eq!(decide_cloud_only(&sensitive, &ls).layer, Layer::Cloud);
    }

    #[test]
    fn policy_names_round_trip() {
        for k in PolicyKind::ALL {
            assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
        }
        assert!("hipa".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn reroute_examples() {
        let ls = layers();
        let t = task(0.5, 1e5);
        let fog = decide_threshold(&t, &ThresholdConfig::default(), &ls);
        assert_eq!(fog.layer, Layer::Fog);

        let r = reroute_on_overload(fog.clone(), &t, &state([0.0, 0.95, 0.0]), 0.9, &ls);
        assert_eq!(r.layer, Layer::Cloud);
        assert!(r.rerouted);
        assert_eq!(r.predicted_latency, predicted_latency(&t, ls.get(Layer::Cloud)));

        let r = reroute_on_overload(fog.clone(), &t, &state([0.0; 3]), 0.9, &ls);
        assert_eq!(r, fog);

        let r = reroute_on_overload(fog.clone(), &t, &state([0.99, 0.99, 0.99]), 1.0, &ls);
        assert_eq!(r, fog);
    }

    #[test]
    fn edge_overload_prefers_fog_then_cloud() {
        let ls = layers();
        let t = task(0.005, 1e5);
        let edge = decide_threshold(&t, &ThresholdConfig::default(), &ls);
        assert_eq!(
            reroute_on_overload(edge.clone(), &t, &state([1.0, 0.2, 0.0]), 0.9, &ls).layer,
            Layer::Fog
        );
        assert_eq!(
            reroute_on_overload(edge, &t, &state([1.0, 0.95, 1.0]), 0.9, &ls).layer,
            Layer::Cloud
        );
    }

    #[test]
    fn rl_without_agent_is_rejected() {
        let cfg = PolicyConfig {
            layers: layers(),
            weights: WeightConfig::default(),
            thresholds: ThresholdConfig::default(),
            fog_high_complexity: 1e8,
            overload_threshold: 0.9,
        };
        assert!(matches!(
            Orchestrator::new(PolicyKind::RlHipa, cfg.clone(), None),
            Err(PolicyError::MissingAgent)
        ));
        let o = Orchestrator::new(PolicyKind::CloudOnly, cfg, None).unwrap();
        assert_eq!(o.decide(&task(0.001, 1.0), &SystemState::idle()).layer, Layer::Cloud);
    }
}
