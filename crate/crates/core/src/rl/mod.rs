//! Deep Q-learning orchestrator built from scratch.

mod agent;
mod encoding;
pub mod io;
mod qnet;
mod replay;

pub use agent::{
    act, train, AgentConfig, Environment, EpsilonSchedule, RewardTransform, TrainedAgent, TrainingOutcome, Transition,
};
pub use encoding::{encode_state, Bounds, NormBounds, StateEncoding, STATE_DIM};
pub use qnet::{Adam, QNetwork, DEFAULT_ARCHITECTURE};
pub use replay::ReplayBuffer;
