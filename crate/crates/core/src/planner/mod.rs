//! The biomap pipeline: explore the environment into a compact vector
//! graph, certify determinism through the dual automaton, transform
//! weights, run Dijkstra, and extract the policy.

mod arbiter;
mod explore;
mod recover;
mod solve;

pub use arbiter::boundary_arbiter;
pub use explore::{explore, ExploreOutcome};
pub use recover::{recover_mdp, RecoveredMdp};
pub use solve::{has_negative_cycle, solve_policy, transform_weights};

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{AutomatonError, DeterminismVerdict, MarkovAutomaton};
use crate::env::{ActionId, EnvError, Environment, Trajectory};
use crate::vecgraph::{ActionVector, CompactVectorGraph, GraphError};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("environment is not deterministic ({} witnesses)", .0.witnesses.len())]
    Nondeterministic(DeterminismVerdict),
    #[error("no goal terminal reachable from the origin")]
    GoalUnreachable,
    #[error("exploration budget exhausted with {phi} unexplored (vertex, action) pairs")]
    BudgetExhausted { phi: usize },
    #[error("graph is not certified deterministic; cannot recover an MDP")]
    NotDeterministic,
    #[error("policy has no action for vertex {0}")]
    PolicyGap(String),
    #[error("negative self-loop or cycle in the transformed graph")]
    NegativeCycle,
    #[error("arbiter tolerance must be at least 2, got {0}")]
    BadTolerance(u32),
    #[error("{0} unit vectors for {1} actions")]
    UnitVectorMismatch(usize, usize),
}

/// Probe tolerance of the boundary arbiter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArbiterParams {
    delta: u32,
}

impl ArbiterParams {
    pub fn new(delta: u32) -> Result<Self, PlannerError> {
        if delta < 2 {
            return Err(PlannerError::BadTolerance(delta));
        }
        Ok(ArbiterParams { delta })
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }
}

impl Default for ArbiterParams {
    fn default() -> Self {
        ArbiterParams { delta: 3 }
    }
}

/// Exploration limits: at most `max_episodes` episodes of at most
/// `max_steps` environment steps each (arbiter probes included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BiomapBudget {
    pub max_episodes: usize,
    pub max_steps: usize,
}

impl Default for BiomapBudget {
    fn default() -> Self {
        BiomapBudget {
            max_episodes: 60,
            max_steps: 50,
        }
    }
}

/// Shortest-path policy over action vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Policy {
    /// Vertex sequence from the origin to a goal terminal; empty when the
    /// origin itself is the goal.
    pub path: Vec<ActionVector>,
    pub action_at: BTreeMap<ActionVector, ActionId>,
}

impl Policy {
    pub fn is_empty(&self) -> bool {
        self.action_at.is_empty()
    }

    /// Serialization as `[{vertex: [..], action: name}]` in path order.
    pub fn to_json(&self, action_names: &[String]) -> serde_json::Value {
        let steps: Vec<serde_json::Value> = self
            .path
            .iter()
            .filter_map(|v| {
                self.action_at.get(v).map(|a| {
                    serde_json::json!({
                        "vertex": v.components(),
                        "action": action_names
                            .get(a.0)
                            .cloned()
                            .unwrap_or_else(|| format!("a{}", a.0)),
                    })
                })
            })
            .collect();
        serde_json::Value::Array(steps)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BiomapMetrics {
    pub episodes: usize,
    pub env_steps: usize,
    pub wall_time_ms: f64,
    /// N * M * delta * |A|: the hard cap on environment interactions.
    pub step_budget_bound: usize,
    /// N * M * delta * |A| + |V|^2 + |E|: the end-to-end work envelope.
    pub complexity_budget: usize,
}

/// Everything a successful biomap run produces.
#[derive(Debug)]
pub struct BiomapOutcome {
    pub graph: CompactVectorGraph,
    pub automaton: MarkovAutomaton,
    pub verdict: DeterminismVerdict,
    pub policy: Policy,
    pub recovered: RecoveredMdp,
    pub metrics: BiomapMetrics,
}

/// End-to-end pipeline: explore, certify, transform, solve, recover.
pub fn run_biomap<E: Environment>(
    env: &mut E,
    unit_vectors: Vec<ActionVector>,
    budget: &BiomapBudget,
    params: &ArbiterParams,
) -> Result<BiomapOutcome, PlannerError> {
    let start = Instant::now();
    let outcome = explore(env, unit_vectors, budget, params)?;
    if !outcome.fully_explored {
        return Err(PlannerError::BudgetExhausted {
            phi: outcome.graph.phi(),
        });
    }
    let automaton = MarkovAutomaton::from_graph(&outcome.graph)?;
    let verdict = automaton.is_deterministic(&outcome.graph);
    if !verdict.deterministic {
        return Err(PlannerError::Nondeterministic(verdict));
    }
    let transformed = transform_weights(&outcome.graph)?;
    let policy = solve_policy(&transformed)?;
    let recovered = recover_mdp(&outcome.graph, &verdict)?;
    let v = outcome.graph.vertex_count();
    let e = outcome.graph.edge_count();
    let step_budget_bound = budget.max_episodes
        * budget.max_steps
        * params.delta() as usize
        * outcome.graph.action_count();
    let metrics = BiomapMetrics {
        episodes: outcome.episodes,
        env_steps: outcome.env_steps,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        step_budget_bound,
        complexity_budget: step_budget_bound + v * v + e,
    };
    Ok(BiomapOutcome {
        graph: outcome.graph,
        automaton,
        verdict,
        policy,
        recovered,
        metrics,
    })
}

/// Deploy a policy by pure path integration: the agent tracks its own
/// action vector and never consults observations.
pub fn execute_policy<E: Environment>(
    env: &mut E,
    policy: &Policy,
    unit_vectors: &[ActionVector],
    step_cap: usize,
) -> Result<Trajectory, PlannerError> {
    let initial = env.reset();
    let mut trajectory = Trajectory::new(initial);
    if policy.is_empty() {
        return Ok(trajectory);
    }
    let dim = unit_vectors[0].dim();
    let mut current = ActionVector::zero(dim);
    for _ in 0..step_cap {
        let action = *policy
            .action_at
            .get(&current)
            .ok_or_else(|| PlannerError::PolicyGap(current.to_string()))?;
        let outcome = env.step(action)?;
        trajectory.append(action, &outcome);
        current = current.add(&unit_vectors[action.0]);
        if outcome.terminal {
            break;
        }
    }
    Ok(trajectory)
}
