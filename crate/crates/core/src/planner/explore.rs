//! Dead-reckoning exploration: repeated episodes that push the explored
//! degree phi to zero while recording every transition in the graph.

use std::collections::VecDeque;

use crate::env::Environment;
use crate::vecgraph::{ActionVector, CompactVectorGraph, GraphEdge, VertexKind};

use super::{boundary_arbiter, ArbiterParams, BiomapBudget, PlannerError};

#[derive(Debug)]
pub struct ExploreOutcome {
    pub graph: CompactVectorGraph,
    pub episodes: usize,
    pub env_steps: usize,
    /// True iff phi reached zero within the budget.
    pub fully_explored: bool,
}

/// Run exploration episodes until phi = 0, the frontier becomes
/// unreachable, or the episode budget is spent.
///
/// Each episode starts at the origin, takes the smallest untaken action
/// at the current vertex, and otherwise replays the shortest recorded
/// path to the frontier. A fresh step that leaves the observation
/// unchanged is handed to the boundary arbiter; its probe steps count
/// against the episode's step budget. Replayed steps are re-recorded so
/// that payload disagreements surface as parallel edges.
pub fn explore<E: Environment>(
    env: &mut E,
    unit_vectors: Vec<ActionVector>,
    budget: &BiomapBudget,
    params: &ArbiterParams,
) -> Result<ExploreOutcome, PlannerError> {
    if unit_vectors.len() != env.action_count() {
        return Err(PlannerError::UnitVectorMismatch(
            unit_vectors.len(),
            env.action_count(),
        ));
    }
    let mut graph = CompactVectorGraph::new(unit_vectors);
    graph.insert_vertex(graph.origin(), VertexKind::Normal);
    let mut episodes = 0;
    let mut env_steps = 0;
    let mut stuck = false;

    while graph.phi() > 0 && episodes < budget.max_episodes && !stuck {
        let mut o = env.reset();
        episodes += 1;
        let mut v = graph.origin();
        let mut steps = 0usize;
        let mut pending: VecDeque<_> = VecDeque::new();

        while steps < budget.max_steps {
            let (action, replay) = match pending.pop_front() {
                Some(a) => (a, true),
                None => match graph.untaken_actions(&v)?.first() {
                    Some(&a) => (a, false),
                    None => match graph.route_to_frontier(&v)? {
                        Some(path) => {
                            debug_assert!(!path.is_empty());
                            pending.extend(path);
                            continue;
                        }
                        None => {
                            // No frontier reachable from here. If even the
                            // origin cannot reach one, no episode ever will.
                            stuck = v == graph.origin();
                            break;
                        }
                    },
                },
            };
            // The arbiter must anchor its probe signature at the state
            // the action is taken from, so remember it for fresh steps.
            let before = if !replay && env.checkpointable() {
                Some(env.checkpoint()?)
            } else {
                None
            };
            let outcome = env.step(action)?;
            steps += 1;
            let reward = outcome.reward.value();
            let unit = graph.unit_vector(action).clone();

            if outcome.terminal {
                let next = v.add(&unit);
                let kind = if outcome.failure {
                    VertexKind::Failure
                } else {
                    VertexKind::Goal
                };
                graph.insert_vertex(next.clone(), kind);
                graph.insert_edge(GraphEdge {
                    src: v,
                    dst: next,
                    action,
                    weight: reward,
                    attribute: unit,
                })?;
                break;
            }

            if !replay && outcome.observation == o {
                // Candidate boundary: rewind the trigger so the arbiter
                // starts from the state the action was taken at. It
                // records the self-loop itself on a positive verdict.
                let before = before.ok_or(PlannerError::Env(
                    crate::env::EnvError::NotCheckpointable,
                ))?;
                env.restore(before)?;
                let mut probe_steps = 0;
                let boundary = boundary_arbiter(
                    env,
                    &mut graph,
                    o,
                    &v,
                    action,
                    reward,
                    params,
                    &mut probe_steps,
                )?;
                steps += probe_steps;
                if boundary {
                    continue;
                }
                // Aliased move: redo the rewound step, then record the
                // edge. Determinism makes the redo repeat the outcome.
                let redo = env.step(action)?;
                steps += 1;
                debug_assert_eq!(redo, outcome);
            }

            let next = v.add(&unit);
            graph.insert_edge(GraphEdge {
                src: v.clone(),
                dst: next.clone(),
                action,
                weight: reward,
                attribute: unit,
            })?;
            v = next;
            o = outcome.observation;
        }
        env_steps += steps;
    }

    Ok(ExploreOutcome {
        fully_explored: graph.phi() == 0,
        graph,
        episodes,
        env_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ActionId;
    use crate::envs::{
        two_action_unit_vectors, AliasedOscillatorEnv, NoisyRewardEnv, SingleStateEnv,
    };
    use crate::vecgraph::EdgeInsert;

    fn defaults() -> (BiomapBudget, ArbiterParams) {
        (BiomapBudget::default(), ArbiterParams::default())
    }

    #[test]
    fn single_state_env_collapses_to_self_loops() {
        let (budget, params) = defaults();
        let mut env = SingleStateEnv::new(4);
        let units = vec![
            ActionVector::new(vec![0, 1]),
            ActionVector::new(vec![1, 0]),
            ActionVector::new(vec![0, -1]),
            ActionVector::new(vec![-1, 0]),
        ];
        let out = explore(&mut env, units, &budget, &params).unwrap();
        assert!(out.fully_explored);
        assert_eq!(out.episodes, 1);
        assert_eq!(out.graph.vertex_count(), 1);
        assert_eq!(out.graph.edge_count(), 4);
        assert!(out.graph.edges().iter().all(|e| e.is_loop()));
        assert_eq!(out.graph.recount_phi(), 0);
    }

    #[test]
    fn noisy_env_replays_and_records_a_conflict() {
        let (budget, params) = defaults();
        let mut env = NoisyRewardEnv::new(42);
        let out = explore(&mut env, two_action_unit_vectors(), &budget, &params).unwrap();
        assert!(out.fully_explored);
        assert_eq!(out.episodes, 3);
        // The third episode replays (origin, a0) and observes a fresh
        // reward draw, leaving two parallel edges behind.
        let origin = out.graph.origin();
        let parallel: Vec<_> = out
            .graph
            .edges_from(&origin)
            .into_iter()
            .filter(|e| e.action == ActionId(0))
            .collect();
        assert_eq!(parallel.len(), 2);
        assert_ne!(parallel[0].weight, parallel[1].weight);
    }

    #[test]
    fn aliased_oscillator_exhausts_the_budget() {
        // Without a true boundary, dead reckoning unrolls the oscillation
        // into an ever-growing line and exploration cannot finish.
        let (budget, params) = defaults();
        let mut env = AliasedOscillatorEnv::new();
        let out = explore(&mut env, two_action_unit_vectors(), &budget, &params).unwrap();
        assert!(!out.fully_explored);
        assert_eq!(out.episodes, budget.max_episodes);
        assert!(out.graph.phi() > 0);
    }

    #[test]
    fn unit_vector_count_must_match_actions() {
        let (budget, params) = defaults();
        let mut env = SingleStateEnv::new(3);
        let err = explore(&mut env, two_action_unit_vectors(), &budget, &params).unwrap_err();
        assert!(matches!(err, PlannerError::UnitVectorMismatch(2, 3)));
    }

    #[test]
    fn duplicate_replay_is_not_double_counted() {
        // Deterministic two-step chain: replaying the recorded prefix must
        // produce duplicates, not extra edges.
        struct Chain {
            state: u8,
            episode: u64,
            saved: Vec<u8>,
        }
        impl Environment for Chain {
            fn action_count(&self) -> usize {
                2
            }
            fn reset(&mut self) -> crate::env::ObservationId {
                self.state = 0;
                self.episode += 1;
                self.saved.clear();
                crate::env::ObservationId(0)
            }
            fn step(
                &mut self,
                action: ActionId,
            ) -> Result<crate::env::StepOutcome, crate::env::EnvError> {
                let (next, obs, reward, terminal) = match (self.state, action.0) {
                    (0, 0) => (1, 1, -1.0, false),
                    (0, 1) => (3, 3, 0.0, true),
                    (1, 0) => (3, 3, 0.0, true),
                    (1, 1) => (2, 2, -1.0, false),
                    (2, _) => (3, 3, 0.0, true),
                    _ => unreachable!(),
                };
                self.state = next;
                Ok(crate::env::StepOutcome {
                    observation: crate::env::ObservationId(obs),
                    reward: crate::env::Reward::new(reward)?,
                    terminal,
                    failure: false,
                })
            }
            fn checkpointable(&self) -> bool {
                true
            }
            fn checkpoint(&mut self) -> Result<crate::env::CheckpointToken, crate::env::EnvError> {
                self.saved.push(self.state);
                Ok(crate::env::CheckpointToken {
                    episode: self.episode,
                    slot: self.saved.len() - 1,
                })
            }
            fn restore(
                &mut self,
                token: crate::env::CheckpointToken,
            ) -> Result<(), crate::env::EnvError> {
                if token.episode != self.episode {
                    return Err(crate::env::EnvError::StaleToken);
                }
                self.state = self.saved[token.slot];
                Ok(())
            }
        }
        let (budget, params) = defaults();
        let mut env = Chain {
            state: 0,
            episode: 0,
            saved: Vec::new(),
        };
        let out = explore(&mut env, two_action_unit_vectors(), &budget, &params).unwrap();
        assert!(out.fully_explored);
        // One edge per explored (vertex, action) pair, nothing duplicated.
        for (v, kind) in out.graph.vertices() {
            if !kind.is_terminal() {
                assert_eq!(out.graph.edges_from(v).len(), 2, "vertex {v}");
            }
        }
        // Re-inserting any recorded edge reports a duplicate.
        let mut graph = out.graph.clone();
        let edge = graph.edges()[0].clone();
        assert_eq!(graph.insert_edge(edge).unwrap(), EdgeInsert::Duplicate);
    }
}
