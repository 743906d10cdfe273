//! Three-tier (edge, fog, cloud) task placement: cost model, placement
//! policies, a DQN placement agent, a discrete-event simulator and reporting.

pub mod error;
pub mod model;
pub mod policy;
pub mod report;
pub mod rl;
pub mod sim;

/// Random source used for every stochastic step.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub use error::{ModelError, PolicyError, ReportError, RlError, SimError};
pub use model::{Layer, LayerSet, LayerSpec, Task};
pub use policy::{Decision, Orchestrator, PolicyKind, SystemState};
