use serde::{Deserialize, Serialize};

use crate::model::Task;
use crate::policy::SystemState;

pub const STATE_DIM: usize = 7;

/// Closed interval used to squash a raw feature into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn new(min: f64, max: f64) -> Self {
        Bounds { min, max }
    }

    fn linear(&self, x: f64) -> f64 {
        if self.max <= self.min {
            return 0.0;
        }
        ((x - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
    }

    fn log(&self, x: f64) -> f64 {
        if self.max <= self.min || self.min <= 0.0 {
            return 0.0;
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        ((x.max(self.min).ln() - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Normalization ranges taken from a scenario's generation bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub latency: Bounds,
    pub complexity: Bounds,
    /// Megabytes.
    pub data_size: Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateEncoding(pub [f64; STATE_DIM]);

impl StateEncoding {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Layout: log latency, log complexity, privacy, data size, then the edge,
/// fog and cloud queue utilizations.
pub fn encode_state(task: &Task, state: &SystemState, norms: &NormBounds) -> StateEncoding {
    let q = state.queue_utilization;
    StateEncoding([
        norms.latency.log(task.latency_req()),
        norms.complexity.log(task.complexity()),
        if task.is_sensitive() { 1.0 } else { 0.0 },
        norms.data_size.linear(task.data_size()),
        q[0].clamp(0.0, 1.0),
        q[1].clamp(0.0, 1.0),
        q[2].clamp(0.0, 1.0),
    ])
}
