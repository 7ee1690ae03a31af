//! Reading a certified-deterministic graph back as a tabular MDP, and
//! the inverse rebuild used to validate that the two views are dual.

use serde::Serialize;

use crate::env::ActionId;
use crate::vecgraph::{ActionVector, CompactVectorGraph, GraphEdge, VertexKind};

use super::PlannerError;
use crate::automaton::DeterminismVerdict;

/// Tabular MDP extracted from a fully explored, certified graph. States
/// are the graph vertices in sorted key order; transitions and rewards
/// are indexed `[state][action]` and are `None` exactly where the graph
/// has no edge (terminal states, or actions never taken).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredMdp {
    pub states: Vec<ActionVector>,
    pub kinds: Vec<VertexKind>,
    pub unit_vectors: Vec<ActionVector>,
    pub start: usize,
    pub transitions: Vec<Vec<Option<usize>>>,
    pub rewards: Vec<Vec<Option<f64>>>,
}

/// Collapse a graph into its MDP reading. Requires a positive
/// determinism verdict: with parallel disagreeing edges there is no
/// single-valued transition or reward function to extract.
pub fn recover_mdp(
    graph: &CompactVectorGraph,
    verdict: &DeterminismVerdict,
) -> Result<RecoveredMdp, PlannerError> {
    if !verdict.deterministic {
        return Err(PlannerError::NotDeterministic);
    }
    let mut keyed: Vec<(ActionVector, VertexKind)> =
        graph.vertices().map(|(v, k)| (v.clone(), k)).collect();
    keyed.sort();
    let index: std::collections::BTreeMap<&ActionVector, usize> = keyed
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v, i))
        .collect();
    let origin = graph.origin();
    let start = *index
        .get(&origin)
        .ok_or(PlannerError::Graph(crate::vecgraph::GraphError::EmptyGraph))?;
    let n = keyed.len();
    let a = graph.action_count();
    let mut transitions = vec![vec![None; a]; n];
    let mut rewards = vec![vec![None; a]; n];
    for edge in graph.edges() {
        let s = index[&edge.src];
        transitions[s][edge.action.0] = Some(index[&edge.dst]);
        rewards[s][edge.action.0] = Some(edge.weight);
    }
    let (states, kinds) = keyed.into_iter().unzip();
    Ok(RecoveredMdp {
        states,
        kinds,
        unit_vectors: graph.unit_vectors().to_vec(),
        start,
        transitions,
        rewards,
    })
}

impl RecoveredMdp {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn action_count(&self) -> usize {
        self.unit_vectors.len()
    }

    /// Rebuild the dual graph: one vertex per state, one edge per defined
    /// (state, action) cell. On a recovered MDP this inverts
    /// `recover_mdp` up to vertex/edge ordering.
    pub fn to_graph(&self) -> Result<CompactVectorGraph, PlannerError> {
        let mut graph = CompactVectorGraph::new(self.unit_vectors.clone());
        for (v, &kind) in self.states.iter().zip(&self.kinds) {
            graph.insert_vertex(v.clone(), kind);
        }
        for (s, row) in self.transitions.iter().enumerate() {
            for (a, target) in row.iter().enumerate() {
                let Some(t) = target else { continue };
                let src = self.states[s].clone();
                let dst = self.states[*t].clone();
                let attribute = if src == dst {
                    self.unit_vectors[a].clone()
                } else {
                    dst.sub(&src)
                };
                graph.insert_edge(GraphEdge {
                    src,
                    dst,
                    action: ActionId(a),
                    weight: self.rewards[s][a].expect("reward defined with transition"),
                    attribute,
                })?;
            }
        }
        Ok(graph)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "states": self.states.iter().map(|v| v.components().to_vec()).collect::<Vec<_>>(),
            "kinds": self.kinds,
            "start": self.start,
            "transitions": self.transitions,
            "rewards": self.rewards,
        })
    }
}
