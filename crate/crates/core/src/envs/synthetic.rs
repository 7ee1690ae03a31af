//! Small synthetic environments for property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{
    ActionId, CheckpointToken, EnvError, Environment, ObservationId, Reward, StepOutcome,
};

/// One state, every action self-loops with reward -1. Degenerate case:
/// the planner's graph collapses to the origin plus `|A|` self-loops.
pub struct SingleStateEnv {
    action_count: usize,
    episode: u64,
    saved: Vec<()>,
}

impl SingleStateEnv {
    pub fn new(action_count: usize) -> Self {
        SingleStateEnv {
            action_count,
            episode: 0,
            saved: Vec::new(),
        }
    }
}

impl Environment for SingleStateEnv {
    fn action_count(&self) -> usize {
        self.action_count
    }

    fn reset(&mut self) -> ObservationId {
        self.episode += 1;
        self.saved.clear();
        ObservationId(0)
    }

    fn step(&mut self, action: ActionId) -> Result<StepOutcome, EnvError> {
        if action.0 >= self.action_count {
            return Err(EnvError::UnknownAction {
                action: action.0,
                count: self.action_count,
            });
        }
        Ok(StepOutcome {
            observation: ObservationId(0),
            reward: Reward::new(-1.0)?,
            terminal: false,
            failure: false,
        })
    }

    fn checkpointable(&self) -> bool {
        true
    }

    fn checkpoint(&mut self) -> Result<CheckpointToken, EnvError> {
        self.saved.push(());
        Ok(CheckpointToken {
            episode: self.episode,
            slot: self.saved.len() - 1,
        })
    }

    fn restore(&mut self, token: CheckpointToken) -> Result<(), EnvError> {
        if token.episode != self.episode {
            return Err(EnvError::StaleToken);
        }
        Ok(())
    }
}

/// Two aliased states A and B sharing observation 0. Action 0 oscillates
/// A <-> B; action 1 leads to distinct goal observations (1 from A, 2
/// from B). Oscillation looks like a boundary to the naive trigger, but
/// the probe signatures of A and B differ, so the arbiter must reject it.
pub struct AliasedOscillatorEnv {
    state: u8, // 0 = A, 1 = B, 2 = done
    episode: u64,
    saved: Vec<u8>,
}

impl AliasedOscillatorEnv {
    pub fn new() -> Self {
        AliasedOscillatorEnv {
            state: 0,
            episode: 0,
            saved: Vec::new(),
        }
    }
}

impl Default for AliasedOscillatorEnv {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for AliasedOscillatorEnv {
    fn action_count(&self) -> usize {
        2
    }

    fn reset(&mut self) -> ObservationId {
        self.state = 0;
        self.episode += 1;
        self.saved.clear();
        ObservationId(0)
    }

    fn step(&mut self, action: ActionId) -> Result<StepOutcome, EnvError> {
        if self.state == 2 {
            return Err(EnvError::StepAfterTerminal);
        }
        if action.0 >= 2 {
            return Err(EnvError::UnknownAction {
                action: action.0,
                count: 2,
            });
        }
        let (next, obs, reward, terminal) = match (self.state, action.0) {
            (0, 0) => (1, 0, -1.0, false),
            (1, 0) => (0, 0, -1.0, false),
            (0, 1) => (2, 1, 0.0, true),
            (1, 1) => (2, 2, 0.0, true),
            _ => unreachable!(),
        };
        self.state = next;
        Ok(StepOutcome {
            observation: ObservationId(obs),
            reward: Reward::new(reward)?,
            terminal,
            failure: false,
        })
    }

    fn checkpointable(&self) -> bool {
        true
    }

    fn checkpoint(&mut self) -> Result<CheckpointToken, EnvError> {
        self.saved.push(self.state);
        Ok(CheckpointToken {
            episode: self.episode,
            slot: self.saved.len() - 1,
        })
    }

    fn restore(&mut self, token: CheckpointToken) -> Result<(), EnvError> {
        if token.episode != self.episode {
            return Err(EnvError::StaleToken);
        }
        self.state = self.saved[token.slot];
        Ok(())
    }
}

/// Deliberately nondeterministic environment: the reward of (s0, a0) is
/// drawn from a continuous distribution on every visit, so two visits
/// almost surely disagree and the automaton check must fail.
///
/// Layout: s0 (obs 0) --a0/random reward--> s1 (obs 1); every other
/// transition reaches the goal (obs 2). Exploration needs three episodes
/// and necessarily replays (s0, a0) while routing to the frontier.
pub struct NoisyRewardEnv {
    state: u8, // 0, 1, 2 = done
    rng: ChaCha8Rng,
    episode: u64,
    saved: Vec<(u8, ChaCha8Rng)>,
}

impl NoisyRewardEnv {
    pub fn new(seed: u64) -> Self {
        NoisyRewardEnv {
            state: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            episode: 0,
            saved: Vec::new(),
        }
    }
}

impl Environment for NoisyRewardEnv {
    fn action_count(&self) -> usize {
        2
    }

    fn reset(&mut self) -> ObservationId {
        self.state = 0;
        self.episode += 1;
        self.saved.clear();
        ObservationId(0)
    }

    fn step(&mut self, action: ActionId) -> Result<StepOutcome, EnvError> {
        if self.state == 2 {
            return Err(EnvError::StepAfterTerminal);
        }
        if action.0 >= 2 {
            return Err(EnvError::UnknownAction {
                action: action.0,
                count: 2,
            });
        }
        let (next, obs, reward, terminal) = match (self.state, action.0) {
            (0, 0) => (1, 1, self.rng.gen_range(-1.0..0.0), false),
            (0, 1) => (2, 2, 1.0, true),
            (1, 0) => (2, 2, 1.0, true),
            (1, 1) => (2, 2, 0.0, true),
            _ => unreachable!(),
        };
        self.state = next;
        Ok(StepOutcome {
            observation: ObservationId(obs),
            reward: Reward::new(reward)?,
            terminal,
            failure: false,
        })
    }

    fn checkpointable(&self) -> bool {
        true
    }

    fn checkpoint(&mut self) -> Result<CheckpointToken, EnvError> {
        self.saved.push((self.state, self.rng.clone()));
        Ok(CheckpointToken {
            episode: self.episode,
            slot: self.saved.len() - 1,
        })
    }

    fn restore(&mut self, token: CheckpointToken) -> Result<(), EnvError> {
        if token.episode != self.episode {
            return Err(EnvError::StaleToken);
        }
        let (state, rng) = self.saved[token.slot].clone();
        self.state = state;
        self.rng = rng;
        Ok(())
    }
}

/// Unit vectors for the two-action synthetic environments.
pub fn two_action_unit_vectors() -> Vec<crate::vecgraph::ActionVector> {
    vec![
        crate::vecgraph::ActionVector::new(vec![1, 0]),
        crate::vecgraph::ActionVector::new(vec![0, 1]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_probe_signatures_differ() {
        let mut env = AliasedOscillatorEnv::new();
        env.reset();
        // From A: action 1 reaches obs 1.
        let t = env.checkpoint().unwrap();
        let from_a = env.step(ActionId(1)).unwrap();
        env.restore(t).unwrap();
        // After the swap, action 1 reaches obs 2.
        env.step(ActionId(0)).unwrap();
        let from_b = env.step(ActionId(1)).unwrap();
        assert_eq!(from_a.observation, ObservationId(1));
        assert_eq!(from_b.observation, ObservationId(2));
    }

    #[test]
    fn noisy_rewards_differ_across_visits() {
        let mut env = NoisyRewardEnv::new(7);
        env.reset();
        let r1 = env.step(ActionId(0)).unwrap().reward;
        env.reset();
        let r2 = env.step(ActionId(0)).unwrap().reward;
        assert_ne!(r1, r2);
    }

    #[test]
    fn noisy_env_restore_replays_the_draw() {
        let mut env = NoisyRewardEnv::new(7);
        env.reset();
        let t = env.checkpoint().unwrap();
        let first = env.step(ActionId(0)).unwrap();
        env.restore(t).unwrap();
        let second = env.step(ActionId(0)).unwrap();
        assert_eq!(first, second);
    }
}
