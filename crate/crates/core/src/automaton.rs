//! Finite Markov automata dual to compact vector graphs.
//!
//! States mirror graph vertices, the alphabet is the action set, and the
//! transition relation collects the destination of every (vertex, action)
//! edge. The determinism verdict certifies whether the explored graph can
//! be read back as a fully observable MDP.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::env::ActionId;
use crate::vecgraph::CompactVectorGraph;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("invalid automaton: {0}")]
    Invalid(String),
}

/// Immutable after construction; freely shareable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovAutomaton {
    states: Vec<String>,
    alphabet: BTreeSet<ActionId>,
    delta: BTreeMap<(usize, ActionId), BTreeSet<usize>>,
    initial: usize,
    accepting: BTreeSet<usize>,
}

/// Why an automaton failed the determinism check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// One (state, letter) pair with more than one target state.
    MultiTarget {
        state: String,
        letter: ActionId,
        targets: Vec<String>,
    },
    /// Parallel (state, letter) edges disagreeing on reward weight. The
    /// graph-to-MDP bijection maps weights to rewards, so disagreement
    /// equally falsifies MDP recovery.
    WeightConflict {
        state: String,
        letter: ActionId,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminismVerdict {
    pub deterministic: bool,
    pub witnesses: Vec<Witness>,
}

impl MarkovAutomaton {
    pub fn new(
        states: Vec<String>,
        alphabet: BTreeSet<ActionId>,
        delta: BTreeMap<(usize, ActionId), BTreeSet<usize>>,
        initial: usize,
        accepting: BTreeSet<usize>,
    ) -> Result<Self, AutomatonError> {
        let n = states.len();
        if n == 0 {
            return Err(AutomatonError::Invalid("no states".into()));
        }
        if initial >= n {
            return Err(AutomatonError::Invalid("initial state out of range".into()));
        }
        if accepting.iter().any(|&q| q >= n) {
            return Err(AutomatonError::Invalid("accepting state out of range".into()));
        }
        for ((q, letter), targets) in &delta {
            if *q >= n || targets.iter().any(|&t| t >= n) {
                return Err(AutomatonError::Invalid("transition out of range".into()));
            }
            if !alphabet.contains(letter) {
                return Err(AutomatonError::Invalid("letter outside alphabet".into()));
            }
        }
        Ok(MarkovAutomaton {
            states,
            alphabet,
            delta,
            initial,
            accepting,
        })
    }

    /// Construct the automaton dual to a graph: Q = vertices (in sorted
    /// key order), Sigma = actions on edges, delta from edges, q0 = the
    /// origin, F = terminal vertices (goal and failure alike).
    pub fn from_graph(graph: &CompactVectorGraph) -> Result<Self, AutomatonError> {
        if graph.vertex_count() == 0 {
            return Err(AutomatonError::EmptyGraph);
        }
        let mut keys: Vec<_> = graph.vertices().map(|(v, k)| (v.clone(), k)).collect();
        keys.sort();
        let index: BTreeMap<_, usize> = keys
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (v.clone(), i))
            .collect();
        let states = keys.iter().map(|(v, _)| v.to_string()).collect();
        let accepting = keys
            .iter()
            .enumerate()
            .filter(|(_, (_, kind))| kind.is_terminal())
            .map(|(i, _)| i)
            .collect();
        let initial = *index
            .get(&graph.origin())
            .ok_or_else(|| AutomatonError::Invalid("graph origin missing".into()))?;
        let mut alphabet = BTreeSet::new();
        let mut delta: BTreeMap<(usize, ActionId), BTreeSet<usize>> = BTreeMap::new();
        for edge in graph.edges() {
            alphabet.insert(edge.action);
            let q = index[&edge.src];
            let t = index[&edge.dst];
            delta.entry((q, edge.action)).or_default().insert(t);
        }
        Ok(MarkovAutomaton {
            states,
            alphabet,
            delta,
            initial,
            accepting,
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &BTreeSet<ActionId> {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn targets(&self, state: usize, letter: ActionId) -> Option<&BTreeSet<usize>> {
        self.delta.get(&(state, letter))
    }

    /// DFA condition plus weight agreement on the originating graph.
    pub fn is_deterministic(&self, graph: &CompactVectorGraph) -> DeterminismVerdict {
        let mut witnesses = Vec::new();
        for ((q, letter), targets) in &self.delta {
            if targets.len() > 1 {
                witnesses.push(Witness::MultiTarget {
                    state: self.states[*q].clone(),
                    letter: *letter,
                    targets: targets.iter().map(|&t| self.states[t].clone()).collect(),
                });
            }
        }
        // Weight agreement across parallel (vertex, action) edges.
        let mut weights: BTreeMap<(String, ActionId), Vec<f64>> = BTreeMap::new();
        for edge in graph.edges() {
            let entry = weights
                .entry((edge.src.to_string(), edge.action))
                .or_default();
            if !entry.iter().any(|w| *w == edge.weight) {
                entry.push(edge.weight);
            }
        }
        for ((state, letter), ws) in weights {
            if ws.len() > 1 {
                witnesses.push(Witness::WeightConflict {
                    state,
                    letter,
                    weights: ws,
                });
            }
        }
        DeterminismVerdict {
            deterministic: witnesses.is_empty(),
            witnesses,
        }
    }

    /// Word acceptance: true iff some branch from q0 consumes the whole
    /// word and lands in an accepting state.
    pub fn recognizes(&self, word: &[ActionId]) -> bool {
        let mut current: BTreeSet<usize> = BTreeSet::new();
        current.insert(self.initial);
        for letter in word {
            let mut next = BTreeSet::new();
            for q in &current {
                if let Some(targets) = self.delta.get(&(*q, *letter)) {
                    next.extend(targets.iter().copied());
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|q| self.accepting.contains(q))
    }

    /// Subset construction. Test oracle for the NDFMA/DFMA language
    /// equivalence property; not used on the planning path.
    pub fn determinize(&self) -> MarkovAutomaton {
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut delta: BTreeMap<(usize, ActionId), BTreeSet<usize>> = BTreeMap::new();
        let start: BTreeSet<usize> = [self.initial].into_iter().collect();
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut work = vec![0usize];
        while let Some(id) = work.pop() {
            let subset = subsets[id].clone();
            for &letter in &self.alphabet {
                let mut next = BTreeSet::new();
                for q in &subset {
                    if let Some(t) = self.delta.get(&(*q, letter)) {
                        next.extend(t.iter().copied());
                    }
                }
                if next.is_empty() {
                    continue;
                }
                let nid = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    work.push(subsets.len() - 1);
                    subsets.len() - 1
                });
                delta.insert((id, letter), [nid].into_iter().collect());
            }
        }
        let accepting = subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|q| self.accepting.contains(q)))
            .map(|(i, _)| i)
            .collect();
        let states = subsets
            .iter()
            .map(|s| {
                let inner: Vec<String> = s.iter().map(|q| self.states[*q].clone()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        MarkovAutomaton {
            states,
            alphabet: self.alphabet.clone(),
            delta,
            initial: 0,
            accepting,
        }
    }

    /// Inspection export of the full tuple.
    pub fn to_json(&self) -> serde_json::Value {
        let delta: Vec<serde_json::Value> = self
            .delta
            .iter()
            .map(|((q, letter), targets)| {
                serde_json::json!({
                    "state": self.states[*q],
                    "letter": letter.0,
                    "targets": targets.iter().map(|&t| self.states[t].clone()).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "states": self.states,
            "alphabet": self.alphabet.iter().map(|a| a.0).collect::<Vec<_>>(),
            "delta": delta,
            "initial": self.states[self.initial],
            "accepting": self.accepting.iter().map(|&q| self.states[q].clone()).collect::<Vec<_>>(),
        })
    }
}
