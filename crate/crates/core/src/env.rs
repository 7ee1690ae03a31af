//! Environment contract for deterministic POMDPs.
//!
//! An environment hides its true state space behind an opaque handle. The
//! agent sees observation labels, rewards, and a terminal flag; identical
//! action sequences from reset must produce identical outcome sequences.
//! Checkpoint/restore lets the boundary arbiter probe branches from one
//! observation without permanently displacing the agent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Observation label emitted by an environment.
///
/// Labels are stable across episodes for the same underlying masked group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObservationId(pub u32);

/// Index into the finite action set of an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub usize);

/// Immediate reward. Always finite; construction rejects NaN and infinity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Reward(f64);

impl Reward {
    pub fn new(value: f64) -> Result<Self, EnvError> {
        if value.is_finite() {
            Ok(Reward(value))
        } else {
            Err(EnvError::NonFiniteReward(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode already terminal; reset before stepping")]
    StepAfterTerminal,
    #[error("unknown action {action} (action count {count})")]
    UnknownAction { action: usize, count: usize },
    #[error("environment does not support checkpointing")]
    NotCheckpointable,
    #[error("checkpoint token is from a different episode")]
    StaleToken,
    #[error("reward is not finite: {0}")]
    NonFiniteReward(f64),
}

/// Result of one environment step.
///
/// `failure` is meaningful only when `terminal` is set: it distinguishes a
/// failure terminal (e.g. a cliff) from a goal terminal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub observation: ObservationId,
    pub reward: Reward,
    pub terminal: bool,
    pub failure: bool,
}

/// Opaque handle for restoring an episode to an earlier hidden state.
/// Tokens are valid only within the episode that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckpointToken {
    pub(crate) episode: u64,
    pub(crate) slot: usize,
}

/// Interactive DET-POMDP episode.
///
/// Implementations must be deterministic: the same action sequence from
/// reset yields the same outcome sequence. Handles are single-owner; run
/// one environment instance per worker.
pub trait Environment {
    /// Size of the action set `|A|`, fixed for the handle's lifetime.
    fn action_count(&self) -> usize;

    /// Start a new episode and return the initial observation.
    fn reset(&mut self) -> ObservationId;

    /// Apply an action to the current episode.
    fn step(&mut self, action: ActionId) -> Result<StepOutcome, EnvError>;

    /// Whether checkpoint/restore is supported.
    fn checkpointable(&self) -> bool {
        false
    }

    fn checkpoint(&mut self) -> Result<CheckpointToken, EnvError> {
        Err(EnvError::NotCheckpointable)
    }

    fn restore(&mut self, _token: CheckpointToken) -> Result<(), EnvError> {
        Err(EnvError::NotCheckpointable)
    }
}

/// Per-episode record of actions, observations, and rewards.
///
/// Within one episode `|observations| = |actions| + 1` and
/// `|rewards| = |actions|`; lists are append-only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    actions: Vec<ActionId>,
    observations: Vec<ObservationId>,
    rewards: Vec<Reward>,
    closed: bool,
}

impl Trajectory {
    /// Open a trajectory with the initial observation from reset.
    pub fn new(initial: ObservationId) -> Self {
        Trajectory {
            actions: Vec::new(),
            observations: vec![initial],
            rewards: Vec::new(),
            closed: false,
        }
    }

    /// Append one step. Marks the trajectory closed on a terminal outcome.
    pub fn append(&mut self, action: ActionId, outcome: &StepOutcome) {
        debug_assert!(!self.closed, "append after terminal outcome");
        self.actions.push(action);
        self.observations.push(outcome.observation);
        self.rewards.push(outcome.reward);
        if outcome.terminal {
            self.closed = true;
        }
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn observations(&self) -> &[ObservationId] {
        &self.observations
    }

    pub fn rewards(&self) -> &[Reward] {
        &self.rewards
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn cumulative_reward(&self) -> f64 {
        self.rewards.iter().map(|r| r.value()).sum()
    }
}
