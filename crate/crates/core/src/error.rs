use thiserror::Error;

/// Rejections raised while building or validating domain values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid task field `{field}`: {reason}")]
    InvalidTask { field: &'static str, reason: String },
    #[error("invalid {layer} layer spec field `{field}`: {reason}")]
    InvalidLayerSpec {
        layer: &'static str,
        field: &'static str,
        reason: String,
    },
    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("malformed node set: {0}")]
    MalformedNodeSet(String),
}

impl ModelError {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Failures from the policy engine.
#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("unknown policy `{0}` (expected one of rl-hipa, threshold-hipa, greedy-utility, cloud-only, static, fog-centric)")]
    UnknownPolicy(String),
    #[error("rl-hipa policy has no trained agent: missing training artifact")]
    MissingAgent,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures from agent training and agent file IO.
#[derive(Debug, Error)]
pub enum RlError {
    #[error("training diverged at episode {episode}, step {step}: non-finite parameter (check the learning rate)")]
    Diverged { episode: usize, step: usize },
    #[error("invalid agent configuration field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("agent file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures from scenario loading and simulation.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Failures from metric aggregation and report emission.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no trace events to aggregate: a run failed upstream")]
    EmptyInput,
    #[error("baseline policy `{0}` is not among the compared reports")]
    UnknownBaseline(String),
    #[error("unknown output format `{0}` (expected csv, json or markdown)")]
    UnknownFormat(String),
    #[error("report csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
