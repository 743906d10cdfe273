//! Epsilon-greedy deep Q-learning over per-task placement decisions.
//!
//! Each decision earns an immediate reward, so with the default discount of
//! zero the TD target is the (transformed) reward itself.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::encoding::{encode_state, NormBounds, StateEncoding};
use super::qnet::{Adam, QNetwork, DEFAULT_ARCHITECTURE};
use super::replay::ReplayBuffer;
use crate::error::RlError;
use crate::model::{argmax_toward_source, Layer, Task};
use crate::policy::SystemState;
use crate::SimRng;

/// Source of training contexts and rewards.
pub trait Environment {
    /// Draws the next task together with the system snapshot it arrives into.
    fn observe(&mut self, rng: &mut SimRng) -> (Task, SystemState);
    /// Realized reward of placing `task` on `layer`.
    fn reward(&self, task: &Task, state: &SystemState, layer: Layer) -> f64;
    fn norms(&self) -> NormBounds;
}

/// Exponential decay from `start` to `end` across the first
/// `decay_fraction` of the episodes, then flat at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_fraction: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            start: 1.0,
            end: 0.05,
            decay_fraction: 0.5,
        }
    }
}

impl EpsilonSchedule {
    pub fn value(&self, episode: usize, episodes: usize) -> f64 {
        let decay_episodes = (self.decay_fraction * episodes as f64).max(1.0);
        let progress = episode as f64 / decay_episodes;
        if progress >= 1.0 || self.start <= 0.0 {
            return self.end;
        }
        if self.end <= 0.0 {
            // geometric decay cannot reach zero; fall back to linear
            return self.start * (1.0 - progress);
        }
        (self.start * (self.end / self.start).powf(progress)).clamp(0.0, 1.0)
    }
}

/// Monotone map applied to rewards before regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardTransform {
    Identity,
    /// `sign(r) * ln(1 + |r|)`; keeps the per-state argmax, tames the scale.
    SignedLog,
}

impl RewardTransform {
    pub fn apply(self, r: f64) -> f64 {
        match self {
            RewardTransform::Identity => r,
            RewardTransform::SignedLog => r.signum() * r.abs().ln_1p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub episodes: usize,
    pub tasks_per_episode: usize,
    pub epsilon: EpsilonSchedule,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    pub discount: f64,
    /// Steps between target-network refreshes; only used when discount > 0.
    pub target_sync_interval: Option<usize>,
    pub reward_transform: RewardTransform,
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            episodes: 1000,
            tasks_per_episode: 32,
            epsilon: EpsilonSchedule::default(),
            learning_rate: 1e-3,
            batch_size: 64,
            replay_capacity: 10_000,
            discount: 0.0,
            target_sync_interval: None,
            reward_transform: RewardTransform::SignedLog,
            hidden: DEFAULT_ARCHITECTURE[1..3].to_vec(),
            seed: 0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), RlError> {
        let bad = |field: &'static str, reason: String| Err(RlError::InvalidConfig { field, reason });
        if self.episodes == 0 {
            return bad("episodes", "must be >= 1".into());
        }
        if self.tasks_per_episode == 0 {
            return bad("tasks_per_episode", "must be >= 1".into());
        }
        let e = &self.epsilon;
        for (field, v) in [("epsilon.start", e.start), ("epsilon.end", e.end)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(field, format!("must lie in [0, 1], got {v}"));
            }
        }
        if !(e.decay_fraction.is_finite() && e.decay_fraction >= 0.0) {
            return bad(
                "epsilon.decay_fraction",
                format!("must be >= 0, got {}", e.decay_fraction),
            );
        }
        // zero is accepted: it freezes the network, which is useful for baselines
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(
                "learning_rate",
                format!("must be finite and >= 0, got {}", self.learning_rate),
            );
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be >= 1".into());
        }
        if self.replay_capacity < self.batch_size {
            return bad(
                "replay_capacity",
                format!(
                    "must be >= batch_size ({}), got {}",
                    self.batch_size, self.replay_capacity
                ),
            );
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return bad("discount", format!("must lie in [0, 1], got {}", self.discount));
        }
        if self.target_sync_interval == Some(0) {
            return bad("target_sync_interval", "must be >= 1 when set".into());
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden", "needs at least one non-empty hidden layer".into());
        }
        Ok(())
    }

    pub fn architecture(&self) -> Vec<usize> {
        let mut sizes = vec![super::STATE_DIM];
        sizes.extend(&self.hidden);
        sizes.push(3);
        sizes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: StateEncoding,
    pub action: Layer,
    pub reward: f64,
    pub next_state: Option<StateEncoding>,
    pub terminal: bool,
}

/// Greedy action with ties broken toward the source, or a uniform random
/// layer with probability `epsilon`.
pub fn act<R: Rng + ?Sized>(q: &QNetwork, s: &StateEncoding, epsilon: f64, rng: &mut R) -> Layer {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return Layer::ALL[rng.random_range(0..3)];
    }
    argmax_toward_source(&q.forward(s.as_slice()))
}

/// A frozen Q-function plus the normalization it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedAgent {
    pub network: QNetwork,
    pub norms: NormBounds,
    pub seed: u64,
    pub episodes: u64,
}

impl TrainedAgent {
    pub fn encode(&self, task: &Task, state: &SystemState) -> StateEncoding {
        encode_state(task, state, &self.norms)
    }

    pub fn q_values(&self, task: &Task, state: &SystemState) -> [f64; 3] {
        self.network.forward(self.encode(task, state).as_slice())
    }

    pub fn greedy(&self, task: &Task, state: &SystemState) -> (Layer, [f64; 3]) {
        let q = self.q_values(task, state);
        (argmax_toward_source(&q), q)
    }
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub agent: TrainedAgent,
    /// Mean raw reward of each episode.
    pub learning_curve: Vec<f64>,
}

pub fn train<E: Environment>(env: &mut E, cfg: &AgentConfig) -> Result<TrainingOutcome, RlError> {
    cfg.validate()?;
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let norms = env.norms();
    let mut online = QNetwork::init(&cfg.architecture(), &mut rng);
    let use_target = cfg.discount > 0.0 && cfg.target_sync_interval.is_some();
    let mut target = online.clone();
    let mut optimizer = Adam::new(online.params().len(), cfg.learning_rate);
    let mut replay: ReplayBuffer<Transition> = ReplayBuffer::new(cfg.replay_capacity);
    let mut grad = vec![0.0; online.params().len()];
    let mut curve = Vec::with_capacity(cfg.episodes);
    let mut step = 0usize;

    for episode in 0..cfg.episodes {
        let epsilon = cfg.epsilon.value(episode, cfg.episodes);
        let mut total = 0.0;
        let (mut task, mut state) = env.observe(&mut rng);
        for k in 0..cfg.tasks_per_episode {
            let s = encode_state(&task, &state, &norms);
            let action = act(&online, &s, epsilon, &mut rng);
            let r = env.reward(&task, &state, action);
            total += r;
            let terminal = k + 1 == cfg.tasks_per_episode;
            let next = if terminal { None } else { Some(env.observe(&mut rng)) };
            replay.push(Transition {
                state: s,
                action,
                reward: cfg.reward_transform.apply(r),
                next_state: next.as_ref().map(|(t, st)| encode_state(t, st, &norms)),
                terminal: terminal || cfg.discount == 0.0,
            });

            if replay.len() >= cfg.batch_size {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let scale = 1.0 / cfg.batch_size as f64;
                let bootstrap = if use_target { &target } else { &online };
                for tr in replay.sample(cfg.batch_size, &mut rng) {
                    let mut td_target = tr.reward;
                    if !tr.terminal {
                        if let Some(ns) = &tr.next_state {
                            let q_next = bootstrap.forward(ns.as_slice());
                            td_target += cfg.discount * q_next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        }
                    }
                    online.accumulate_gradient(tr.state.as_slice(), tr.action, td_target, scale, &mut grad);
                }
                optimizer.step(online.params_mut(), &grad);
                if !online.is_finite() {
                    return Err(RlError::Diverged { episode, step });
                }
                step += 1;
                if let (true, Some(every)) = (use_target, cfg.target_sync_interval) {
                    if step.is_multiple_of(every) {
                        target = online.clone();
                    }
                }
            }
            if let Some((t, st)) = next {
                task = t;
                state = st;
            }
        }
        curve.push(total / cfg.tasks_per_episode as f64);
    }

    Ok(TrainingOutcome {
        agent: TrainedAgent {
            network: online,
            norms,
            seed: cfg.seed,
            episodes: cfg.episodes as u64,
        },
        learning_curve: curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_schedule_shape() {
        let s = EpsilonSchedule::default();
        assert_eq!(s.value(0, 1000), 1.0);
        assert!((s.value(500, 1000) - 0.05).abs() < 1e-12);
        assert_eq!(s.value(999, 1000), 0.05);
        let mut prev = 1.0;
        for ep in 0..1000 {
            let e = s.value(ep, 1000);
            assert!((0.0..=1.0).contains(&e));
            assert!(e <= prev + 1e-15);
            prev = e;
        }
    }

    #[test]
    fn greedy_act_and_tie_break() {
        let mut q = QNetwork::zeros(&DEFAULT_ARCHITECTURE);
        let n = q.params().len();
        let s = StateEncoding([0.0; 7]);
        let mut rng = SimRng::seed_from_u64(0);
        q.params_mut()[n - 3..].copy_from_slice(&[5.0, 1.0, 1.0]);
        assert_eq!(act(&q, &s, 0.0, &mut rng), Layer::Edge);
        q.params_mut()[n - 3..].copy_from_slice(&[2.0, 2.0, 0.0]);
        assert_eq!(act(&q, &s, 0.0, &mut rng), Layer::Edge);
        q.params_mut()[n - 3..].copy_from_slice(&[0.0, 2.0, 3.0]);
        assert_eq!(act(&q, &s, 0.0, &mut rng), Layer::Cloud);
    }

    #[test]
    fn config_validation() {
        assert!(AgentConfig::default().validate().is_ok());
        let bad = [
            AgentConfig {
                episodes: 0,
                ..Default::default()
            },
            AgentConfig {
                batch_size: 64,
                replay_capacity: 10,
                ..Default::default()
            },
            AgentConfig {
                learning_rate: f64::NAN,
                ..Default::default()
            },
            AgentConfig {
                epsilon: EpsilonSchedule {
                    start: 1.5,
                    ..Default::default()
                },
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn signed_log_is_monotone() {
        let t = RewardTransform::SignedLog;
        let xs = [-10.0, -1.0, 0.0, 0.5, 1.0, 170.0, 1e6];
        for w in xs.windows(2) {
            assert!(t.apply(w[0]) < t.apply(w[1]));
        }
    }
}
