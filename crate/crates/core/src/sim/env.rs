use rand::Rng;

use super::scenario::{ScenarioSpec, TaskMix};
use super::workload::draw_task;
use crate::error::ModelError;
use crate::model::{reward, EncryptionParams, Layer, LayerSet, Task, TaskId, WeightConfig};
use crate::policy::SystemState;
use crate::rl::{Environment, NormBounds};
use crate::SimRng;

/// Training environment backed by a scenario's task mix and cost model.
///
/// Queue-utilization features are drawn uniformly from `[0, load]`; rewards
/// come from the modeled cost of the chosen layer, so the optimal action is
/// the per-task reward argmax.
#[derive(Debug, Clone)]
pub struct ScenarioEnv {
    mix: TaskMix,
    layers: LayerSet,
    weights: WeightConfig,
    encryption: EncryptionParams,
    norms: NormBounds,
    load: f64,
    next_id: TaskId,
}

impl ScenarioEnv {
    pub fn new(spec: &ScenarioSpec) -> Result<Self, ModelError> {
        spec.validate()?;
        Ok(ScenarioEnv {
            mix: spec.mix.clone(),
            layers: spec.layer_set()?,
            weights: spec.weights,
            encryption: spec.encryption,
            norms: spec.norm_bounds(),
            load: spec.training_load,
            next_id: 0,
        })
    }

    /// Same cost model, different task mix.
    pub fn with_mix(mut self, mix: TaskMix) -> Self {
        self.mix = mix;
        self
    }

    pub fn layers(&self) -> &LayerSet {
        &self.layers
    }

    pub fn weights(&self) -> &WeightConfig {
        &self.weights
    }

    pub fn encryption(&self) -> &EncryptionParams {
        &self.encryption
    }
}

impl Environment for ScenarioEnv {
    fn observe(&mut self, rng: &mut SimRng) -> (Task, SystemState) {
        let task = draw_task(self.next_id, &self.mix, rng);
        self.next_id += 1;
        let load = self.load;
        let mut util = || if load > 0.0 { rng.random::<f64>() * load } else { 0.0 };
        let state = SystemState {
            queue_utilization: [util(), util(), util()],
            ..SystemState::idle()
        };
        (task, state)
    }

    fn reward(&self, task: &Task, _state: &SystemState, layer: Layer) -> f64 {
        reward(task, self.layers.get(layer), &self.weights, &self.encryption)
    }

    fn norms(&self) -> NormBounds {
        self.norms
    }
}
