//! Boundary arbitration: deciding whether a self-looping observation is a
//! true boundary (the action really keeps the agent in place) or aliasing
//! between distinct hidden states that share a label.

use crate::env::{ActionId, Environment, ObservationId};
use crate::vecgraph::{ActionVector, CompactVectorGraph, GraphEdge};

use super::{ArbiterParams, PlannerError};

/// Decide whether action `action` self-loops at the current hidden state.
///
/// Call with the environment sitting at the state the candidate action
/// is taken from. The one-step observation signature of that state is
/// recorded first; the action is then applied `delta - 1` times, and the
/// verdict is positive only if the observation and the whole signature
/// survive every application. Anchoring the signature before the first
/// application matters: a move into an aliased neighbour that then
/// bumps a wall would look stable if probing only started afterwards.
///
/// Every per-action probe is individually checkpointed and rolled back;
/// the applications of `action` advance the working state, but the whole
/// procedure restores the entry state before returning. On a positive
/// verdict the self-loop edge at `v` (weight `loop_reward`) is recorded in
/// the graph. `steps` accumulates every environment interaction made.
pub fn boundary_arbiter<E: Environment>(
    env: &mut E,
    graph: &mut CompactVectorGraph,
    o: ObservationId,
    v: &ActionVector,
    action: ActionId,
    loop_reward: f64,
    params: &ArbiterParams,
    steps: &mut usize,
) -> Result<bool, PlannerError> {
    if !env.checkpointable() {
        return Err(PlannerError::Env(crate::env::EnvError::NotCheckpointable));
    }
    let entry = env.checkpoint()?;
    let verdict = probe_loop(env, o, action, params, steps)?;
    env.restore(entry)?;
    if verdict {
        graph.insert_edge(GraphEdge {
            src: v.clone(),
            dst: v.clone(),
            action,
            weight: loop_reward,
            attribute: graph.unit_vector(action).clone(),
        })?;
    }
    Ok(verdict)
}

/// Inner loop: record the one-step observation signature of the entry
/// state, then apply `action` delta - 1 times, demanding after each
/// application that the observation is still `o` and the signature is
/// unchanged. Aliased states that merely share a label almost always
/// differ in some probe direction and are rejected here.
fn probe_loop<E: Environment>(
    env: &mut E,
    o: ObservationId,
    action: ActionId,
    params: &ArbiterParams,
    steps: &mut usize,
) -> Result<bool, PlannerError> {
    let n = env.action_count();
    let mut signature = Vec::with_capacity(n);
    for j in 0..n {
        let token = env.checkpoint()?;
        let outcome = env.step(ActionId(j))?;
        *steps += 1;
        env.restore(token)?;
        signature.push(outcome.observation);
    }
    for _ in 1..params.delta() {
        let outcome = env.step(action)?;
        *steps += 1;
        if outcome.terminal || outcome.observation != o {
            return Ok(false);
        }
        for j in 0..n {
            let token = env.checkpoint()?;
            let probe = env.step(ActionId(j))?;
            *steps += 1;
            env.restore(token)?;
            if probe.observation != signature[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
