//! Model-based analysis tools for the cliff board: value iteration on
//! the ground-truth MDP, the QMDP belief baseline, and the masked-group
//! value variance that quantifies how much masking hides.

use serde::Serialize;
use thiserror::Error;

use crate::env::{ActionId, EnvError, Environment, ObservationId, Trajectory};
use crate::envs::{cliff_transition, observe, GridPos, MaskGrouping, GRID_COUNT};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("value iteration did not converge within {iterations} sweeps (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("belief update produced an all-zero belief (action {action}, observation {observation})")]
    DegenerateBelief { action: usize, observation: u32 },
}

/// Optimal action values of the ground-truth cliff MDP. Terminal states
/// are absorbing with value zero; the discount is 1.
#[derive(Debug, Clone, Serialize)]
pub struct QTable {
    q: Vec<[f64; 4]>,
}

impl QTable {
    pub fn q(&self, s: GridPos, a: ActionId) -> f64 {
        self.q[s.index() as usize][a.0]
    }

    pub fn value(&self, s: GridPos) -> f64 {
        if s.is_terminal() {
            return 0.0;
        }
        self.q[s.index() as usize]
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Argmax action, ties broken by the smallest action id.
    pub fn greedy(&self, s: GridPos) -> ActionId {
        let row = &self.q[s.index() as usize];
        let mut best = 0;
        for a in 1..4 {
            if row[a] > row[best] {
                best = a;
            }
        }
        ActionId(best)
    }
}

/// Undiscounted value iteration over the true dynamics, iterated until
/// the sup-norm residual drops below `tol`. Terminal absorption keeps
/// the fixed point finite despite the discount of 1.
pub fn value_iteration(tol: f64, max_iterations: usize) -> Result<QTable, AnalysisError> {
    let mut values = [0.0f64; GRID_COUNT];
    let mut q = vec![[0.0f64; 4]; GRID_COUNT];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        residual = 0.0;
        for cell in 0..GRID_COUNT as u8 {
            let s = GridPos::new(cell).expect("cell in range");
            if s.is_terminal() {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            for a in 0..4 {
                let t = cliff_transition(s, ActionId(a));
                let v_next = if t.terminal {
                    0.0
                } else {
                    values[t.pos.index() as usize]
                };
                q[cell as usize][a] = t.reward + v_next;
                best = best.max(q[cell as usize][a]);
            }
            residual = residual.max((best - values[cell as usize]).abs());
            values[cell as usize] = best;
        }
        if residual < tol {
            return Ok(QTable { q });
        }
    }
    Err(AnalysisError::NonConvergence {
        iterations: max_iterations,
        residual,
    })
}

/// Value dispersion a masked group hides from the agent: the population
/// variance of the per-state error e_i = -Q(s_i, a) + mean_j Q(s_j, a).
pub fn fog_variance(q_values: &[f64]) -> f64 {
    let n = q_values.len() as f64;
    let mean = q_values.iter().sum::<f64>() / n;
    q_values
        .iter()
        .map(|q| {
            let e = -q + mean;
            e * e
        })
        .sum::<f64>()
        / n
}

/// Fog variance of one masked group under one action.
pub fn group_fog_variance(q: &QTable, group: &std::collections::BTreeSet<u8>, a: ActionId) -> f64 {
    let values: Vec<f64> = group
        .iter()
        .map(|&cell| q.q(GridPos::new(cell).expect("cell in range"), a))
        .collect();
    fog_variance(&values)
}

/// Observation-driven controller interface shared by the baselines.
pub trait ActionSelector {
    /// Called once per episode with the initial observation.
    fn begin(&mut self, o: ObservationId) -> Result<(), AnalysisError>;

    fn select(&mut self) -> Result<ActionId, AnalysisError>;

    /// Called after every non-terminal step with the chosen action and
    /// the new observation.
    fn observe(&mut self, a: ActionId, o: ObservationId) -> Result<(), AnalysisError>;
}

/// Roll out a selector for one episode, up to `step_cap` steps.
pub fn evaluate_policy<E: Environment, S: ActionSelector>(
    env: &mut E,
    selector: &mut S,
    step_cap: usize,
) -> Result<Trajectory, AnalysisError> {
    let initial = env.reset();
    selector.begin(initial)?;
    let mut trajectory = Trajectory::new(initial);
    for _ in 0..step_cap {
        let action = selector.select()?;
        let outcome = env.step(action)?;
        trajectory.append(action, &outcome);
        if outcome.terminal {
            break;
        }
        selector.observe(action, outcome.observation)?;
    }
    Ok(trajectory)
}

/// Fully observed greedy play: only correct when the observation equals
/// the grid index, i.e. with masking disabled.
pub struct GreedySelector {
    q: QTable,
    state: GridPos,
}

impl GreedySelector {
    pub fn new(q: QTable) -> Self {
        GreedySelector {
            q,
            state: GridPos::new(0).expect("valid"),
        }
    }
}

impl ActionSelector for GreedySelector {
    fn begin(&mut self, o: ObservationId) -> Result<(), AnalysisError> {
        self.state = GridPos::new(o.0 as u8).expect("identity observation");
        Ok(())
    }

    fn select(&mut self) -> Result<ActionId, AnalysisError> {
        Ok(self.q.greedy(self.state))
    }

    fn observe(&mut self, _a: ActionId, o: ObservationId) -> Result<(), AnalysisError> {
        self.state = GridPos::new(o.0 as u8).expect("identity observation");
        Ok(())
    }
}

/// QMDP: maintain an exact belief over hidden grids and act greedily on
/// the belief-averaged optimal Q values.
pub struct QmdpPolicy {
    q: QTable,
    grouping: MaskGrouping,
    belief: Vec<f64>,
}

impl QmdpPolicy {
    pub fn new(q: QTable, grouping: MaskGrouping) -> Self {
        QmdpPolicy {
            q,
            grouping,
            belief: vec![0.0; GRID_COUNT],
        }
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }
}

impl ActionSelector for QmdpPolicy {
    /// Uniform prior over the non-terminal grids consistent with the
    /// initial observation.
    fn begin(&mut self, o: ObservationId) -> Result<(), AnalysisError> {
        self.belief.iter_mut().for_each(|b| *b = 0.0);
        let mut mass = 0usize;
        for cell in 0..GRID_COUNT as u8 {
            let s = GridPos::new(cell).expect("cell in range");
            if !s.is_terminal() && observe(s, &self.grouping) == o {
                self.belief[cell as usize] = 1.0;
                mass += 1;
            }
        }
        if mass == 0 {
            return Err(AnalysisError::DegenerateBelief {
                action: usize::MAX,
                observation: o.0,
            });
        }
        let norm = mass as f64;
        self.belief.iter_mut().for_each(|b| *b /= norm);
        Ok(())
    }

    fn select(&mut self) -> Result<ActionId, AnalysisError> {
        let mut best = ActionId(0);
        let mut best_score = f64::NEG_INFINITY;
        for a in 0..4 {
            let score: f64 = self
                .belief
                .iter()
                .enumerate()
                .filter(|(_, &b)| b > 0.0)
                .map(|(cell, &b)| b * self.q.q(GridPos::new(cell as u8).expect("valid"), ActionId(a)))
                .sum();
            if score > best_score {
                best_score = score;
                best = ActionId(a);
            }
        }
        Ok(best)
    }

    /// Exact deterministic filter:
    /// b'(s') proportional to sum_s b(s) [T(s,a) = s'] [omega(s') = o'].
    fn observe(&mut self, a: ActionId, o: ObservationId) -> Result<(), AnalysisError> {
        let mut next = vec![0.0; GRID_COUNT];
        for (cell, &b) in self.belief.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let s = GridPos::new(cell as u8).expect("cell in range");
            if s.is_terminal() {
                continue;
            }
            let t = cliff_transition(s, a);
            if observe(t.pos, &self.grouping) == o {
                next[t.pos.index() as usize] += b;
            }
        }
        let total: f64 = next.iter().sum();
        if total == 0.0 {
            return Err(AnalysisError::DegenerateBelief {
                action: a.0,
                observation: o.0,
            });
        }
        next.iter_mut().for_each(|b| *b /= total);
        self.belief = next;
        Ok(())
    }
}
