//! The Compact Vector Graph: the agent's dead-reckoning memory.
//!
//! Vertices are cumulative action vectors measured from the episode
//! origin; edges carry the observed reward as weight and the action's
//! unit vector as attribute. The explored degree phi counts the
//! (vertex, action) pairs not yet tried; zero means full exploration.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::ActionId;

/// Integer displacement vector; acts as the vertex key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionVector(Vec<i32>);

impl ActionVector {
    pub fn new(components: Vec<i32>) -> Self {
        ActionVector(components)
    }

    pub fn zero(dim: usize) -> Self {
        ActionVector(vec![0; dim])
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &ActionVector) -> ActionVector {
        debug_assert_eq!(self.0.len(), other.0.len());
        ActionVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ActionVector) -> ActionVector {
        debug_assert_eq!(self.0.len(), other.0.len());
        ActionVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for ActionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Role of a vertex once its terminal status is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Normal,
    Goal,
    Failure,
}

impl VertexKind {
    pub fn is_terminal(self) -> bool {
        !matches!(self, VertexKind::Normal)
    }
}

/// Reward-weighted, action-attributed edge between action vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub src: ActionVector,
    pub dst: ActionVector,
    pub action: ActionId,
    pub weight: f64,
    pub attribute: ActionVector,
}

impl GraphEdge {
    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} not present in the graph")]
    UnknownVertex(String),
    #[error("edge invariant violated: dst - src != attribute for {src} -> {dst}")]
    InvariantViolation { src: String, dst: String },
    #[error("graph has no vertices")]
    EmptyGraph,
}

/// Outcome of inserting an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeInsert {
    Inserted,
    /// Fully identical re-observation of a recorded edge; nothing stored.
    Duplicate,
    /// Same (src, action) but conflicting payload; stored as a parallel
    /// edge for the determinism verdict to flag.
    Conflict,
}

#[derive(Debug, Clone)]
struct VertexData {
    kind: VertexKind,
    taken: BTreeSet<ActionId>,
}

/// Multigraph of cumulative action vectors with explored-degree
/// bookkeeping. Single-writer during exploration.
#[derive(Debug, Clone)]
pub struct CompactVectorGraph {
    unit_vectors: Vec<ActionVector>,
    index: HashMap<ActionVector, usize>,
    keys: Vec<ActionVector>,
    data: Vec<VertexData>,
    edges: Vec<GraphEdge>,
    out_edges: Vec<Vec<usize>>,
    phi: usize,
}

impl CompactVectorGraph {
    /// `unit_vectors[a]` is the displacement of action `a`; its length
    /// fixes both `|A|` and the embedding dimension.
    pub fn new(unit_vectors: Vec<ActionVector>) -> Self {
        assert!(!unit_vectors.is_empty(), "need at least one action");
        let dim = unit_vectors[0].dim();
        assert!(
            unit_vectors.iter().all(|u| u.dim() == dim),
            "unit vectors must share one dimension"
        );
        CompactVectorGraph {
            unit_vectors,
            index: HashMap::new(),
            keys: Vec::new(),
            data: Vec::new(),
            edges: Vec::new(),
            out_edges: Vec::new(),
            phi: 0,
        }
    }

    pub fn action_count(&self) -> usize {
        self.unit_vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.unit_vectors[0].dim()
    }

    pub fn unit_vector(&self, action: ActionId) -> &ActionVector {
        &self.unit_vectors[action.0]
    }

    pub fn unit_vectors(&self) -> &[ActionVector] {
        &self.unit_vectors
    }

    pub fn origin(&self) -> ActionVector {
        ActionVector::zero(self.dim())
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn vertex_count(&self) -> usize {
        self.keys.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&ActionVector, VertexKind)> {
        self.keys.iter().zip(self.data.iter().map(|d| d.kind))
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn contains(&self, v: &ActionVector) -> bool {
        self.index.contains_key(v)
    }

    pub fn kind(&self, v: &ActionVector) -> Option<VertexKind> {
        self.index.get(v).map(|&i| self.data[i].kind)
    }

    /// Idempotent vertex insertion. New non-terminal vertices add `|A|`
    /// to phi; terminal vertices add nothing (no applicable actions).
    pub fn insert_vertex(&mut self, v: ActionVector, kind: VertexKind) -> bool {
        if self.index.contains_key(&v) {
            return false;
        }
        let id = self.keys.len();
        self.index.insert(v.clone(), id);
        self.keys.push(v);
        self.data.push(VertexData {
            kind,
            taken: BTreeSet::new(),
        });
        self.out_edges.push(Vec::new());
        if !kind.is_terminal() {
            self.phi += self.action_count();
        }
        true
    }

    /// Record an observed edge. The destination vertex is created as
    /// non-terminal when absent; insert it first if it is terminal.
    pub fn insert_edge(&mut self, edge: GraphEdge) -> Result<EdgeInsert, GraphError> {
        if !edge.is_loop() && edge.dst.sub(&edge.src) != edge.attribute {
            return Err(GraphError::InvariantViolation {
                src: edge.src.to_string(),
                dst: edge.dst.to_string(),
            });
        }
        let src_id = *self
            .index
            .get(&edge.src)
            .ok_or_else(|| GraphError::UnknownVertex(edge.src.to_string()))?;
        self.insert_vertex(edge.dst.clone(), VertexKind::Normal);

        let mut status = EdgeInsert::Inserted;
        for &ei in &self.out_edges[src_id] {
            let existing = &self.edges[ei];
            if existing.action != edge.action {
                continue;
            }
            if existing.dst == edge.dst
                && existing.weight == edge.weight
                && existing.attribute == edge.attribute
            {
                return Ok(EdgeInsert::Duplicate);
            }
            status = EdgeInsert::Conflict;
        }
        if self.data[src_id].taken.insert(edge.action) && !self.data[src_id].kind.is_terminal() {
            self.phi -= 1;
        }
        self.out_edges[src_id].push(self.edges.len());
        self.edges.push(edge);
        Ok(status)
    }

    /// Actions never taken at `v`; empty for terminal vertices.
    pub fn untaken_actions(&self, v: &ActionVector) -> Result<Vec<ActionId>, GraphError> {
        let &id = self
            .index
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
        let data = &self.data[id];
        if data.kind.is_terminal() {
            return Ok(Vec::new());
        }
        Ok((0..self.action_count())
            .map(ActionId)
            .filter(|a| !data.taken.contains(a))
            .collect())
    }

    pub fn taken_actions(&self, v: &ActionVector) -> Result<Vec<ActionId>, GraphError> {
        let &id = self
            .index
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
        Ok(self.data[id].taken.iter().copied().collect())
    }

    pub fn edges_from(&self, v: &ActionVector) -> Vec<&GraphEdge> {
        match self.index.get(v) {
            Some(&id) => self.out_edges[id].iter().map(|&ei| &self.edges[ei]).collect(),
            None => Vec::new(),
        }
    }

    /// Breadth-first shortest edge path from `v` to the nearest vertex
    /// with untaken actions, as a list of actions to take. Empty when `v`
    /// itself has untaken actions; `None` when no frontier is reachable.
    pub fn route_to_frontier(
        &self,
        v: &ActionVector,
    ) -> Result<Option<Vec<ActionId>>, GraphError> {
        let &start = self
            .index
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
        let has_frontier = |id: usize| {
            !self.data[id].kind.is_terminal()
                && self.data[id].taken.len() < self.action_count()
        };
        if has_frontier(start) {
            return Ok(Some(Vec::new()));
        }
        let mut prev: Vec<Option<(usize, ActionId)>> = vec![None; self.keys.len()];
        let mut seen = vec![false; self.keys.len()];
        let mut queue = VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(id) = queue.pop_front() {
            if self.data[id].kind.is_terminal() {
                continue; // no actions applicable at terminal vertices
            }
            // Deterministic expansion: sorted by (dst key, action).
            let mut nexts: Vec<(usize, ActionId)> = self.out_edges[id]
                .iter()
                .map(|&ei| &self.edges[ei])
                .filter(|e| !e.is_loop())
                .map(|e| (self.index[&e.dst], e.action))
                .collect();
            nexts.sort_by(|a, b| (&self.keys[a.0], a.1).cmp(&(&self.keys[b.0], b.1)));
            for (nid, action) in nexts {
                if seen[nid] {
                    continue;
                }
                seen[nid] = true;
                prev[nid] = Some((id, action));
                if has_frontier(nid) {
                    let mut path = Vec::new();
                    let mut cur = nid;
                    while cur != start {
                        let (p, a) = prev[cur].expect("path back to start");
                        path.push(a);
                        cur = p;
                    }
                    path.reverse();
                    return Ok(Some(path));
                }
                queue.push_back(nid);
            }
        }
        Ok(None)
    }

    /// Recompute phi from scratch; must always equal the running total.
    pub fn recount_phi(&self) -> usize {
        self.data
            .iter()
            .filter(|d| !d.kind.is_terminal())
            .map(|d| self.action_count() - d.taken.len())
            .sum()
    }

    /// Canonical, order-independent form for equality checks and export.
    pub fn canonical(&self) -> CanonicalGraph {
        let mut vertices: Vec<(ActionVector, VertexKind)> = self
            .keys
            .iter()
            .cloned()
            .zip(self.data.iter().map(|d| d.kind))
            .collect();
        vertices.sort();
        let mut edges: Vec<CanonicalEdge> = self
            .edges
            .iter()
            .map(|e| CanonicalEdge {
                src: e.src.clone(),
                action: e.action,
                dst: e.dst.clone(),
                weight: e.weight,
                attribute: e.attribute.clone(),
            })
            .collect();
        edges.sort_by(|a, b| {
            (&a.src, a.action, &a.dst)
                .cmp(&(&b.src, b.action, &b.dst))
                .then(a.weight.total_cmp(&b.weight))
        });
        CanonicalGraph {
            unit_vectors: self.unit_vectors.clone(),
            vertices,
            edges,
            phi: self.phi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalEdge {
    pub src: ActionVector,
    pub action: ActionId,
    pub dst: ActionVector,
    pub weight: f64,
    pub attribute: ActionVector,
}

/// Sorted snapshot of a graph; byte-stable under serde_json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalGraph {
    pub unit_vectors: Vec<ActionVector>,
    pub vertices: Vec<(ActionVector, VertexKind)>,
    pub edges: Vec<CanonicalEdge>,
    pub phi: usize,
}

impl CanonicalGraph {
    /// Rebuild a working graph from the snapshot. Inverse of
    /// [`CompactVectorGraph::canonical`] up to internal ordering.
    pub fn to_graph(&self) -> Result<CompactVectorGraph, GraphError> {
        let mut graph = CompactVectorGraph::new(self.unit_vectors.clone());
        for (v, kind) in &self.vertices {
            graph.insert_vertex(v.clone(), *kind);
        }
        for e in &self.edges {
            graph.insert_edge(GraphEdge {
                src: e.src.clone(),
                dst: e.dst.clone(),
                action: e.action,
                weight: e.weight,
                attribute: e.attribute.clone(),
            })?;
        }
        Ok(graph)
    }
}
