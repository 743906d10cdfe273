//! Seeded workload generation and discrete-event execution.

mod engine;
mod env;
pub mod export;
mod scenario;
mod workload;

pub use engine::{build_system_state, replicate, run, run_tasks, NodePool, Trace, TraceEvent};
pub use env::ScenarioEnv;
pub use scenario::{
    Band, BandMix, BandRanges, DataSizeRange, LayerConfig, LayerConfigs, Sampling, ScenarioSpec, SizeUnit, TaskMix,
    SMART_CITY_JSON,
};
pub use workload::{draw_task, generate_workload};
