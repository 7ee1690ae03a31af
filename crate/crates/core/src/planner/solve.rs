//! Weight transformation and shortest-path policy extraction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::env::ActionId;
use crate::vecgraph::{ActionVector, CompactVectorGraph, GraphEdge, GraphError, VertexKind};

use super::{PlannerError, Policy};

/// Rebuild the graph with rewards turned into non-negative path costs:
/// shift all weights by |min| when the minimum is negative, then invert
/// each as max - w so that high reward becomes low cost.
pub fn transform_weights(graph: &CompactVectorGraph) -> Result<CompactVectorGraph, PlannerError> {
    if graph.vertex_count() == 0 {
        return Err(PlannerError::Graph(GraphError::EmptyGraph));
    }
    let mut out = CompactVectorGraph::new(graph.unit_vectors().to_vec());
    for (v, kind) in graph.vertices() {
        out.insert_vertex(v.clone(), kind);
    }
    if graph.edge_count() == 0 {
        return Ok(out);
    }
    let min = graph
        .edges()
        .iter()
        .map(|e| e.weight)
        .fold(f64::INFINITY, f64::min);
    let max = graph
        .edges()
        .iter()
        .map(|e| e.weight)
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = if min < 0.0 { -min } else { 0.0 };
    let top = max + shift;
    for edge in graph.edges() {
        out.insert_edge(GraphEdge {
            weight: top - (edge.weight + shift),
            ..edge.clone()
        })?;
    }
    if has_negative_cycle(&out) {
        return Err(PlannerError::NegativeCycle);
    }
    Ok(out)
}

/// Bellman-Ford negative-cycle detection over the minimum-weight simple
/// adjacency (self-loops included), seeded from every vertex at once.
pub fn has_negative_cycle(graph: &CompactVectorGraph) -> bool {
    let keys: Vec<&ActionVector> = graph.vertices().map(|(v, _)| v).collect();
    let index: BTreeMap<&ActionVector, usize> =
        keys.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut arcs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in graph.edges() {
        let key = (index[&e.src], index[&e.dst]);
        let w = arcs.entry(key).or_insert(f64::INFINITY);
        *w = w.min(e.weight);
    }
    let n = keys.len();
    let mut dist = vec![0.0f64; n];
    for round in 0..=n {
        let mut improved = false;
        for (&(s, d), &w) in &arcs {
            if dist[s] + w < dist[d] {
                dist[d] = dist[s] + w;
                improved = true;
            }
        }
        if !improved {
            return false;
        }
        if round == n {
            return true;
        }
    }
    false
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    idx: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest
        // (dist, idx) first for deterministic expansion.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from the origin over a transformed (non-negative) graph to
/// the cheapest goal terminal. Between two vertices the minimum-weight
/// edge is used, ties broken by the smallest action id; among equally
/// cheap goals the smallest vertex key wins.
pub fn solve_policy(graph: &CompactVectorGraph) -> Result<Policy, PlannerError> {
    if graph.vertex_count() == 0 {
        return Err(PlannerError::Graph(GraphError::EmptyGraph));
    }
    let mut keys: Vec<(ActionVector, VertexKind)> =
        graph.vertices().map(|(v, k)| (v.clone(), k)).collect();
    keys.sort();
    let index: BTreeMap<&ActionVector, usize> = keys
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v, i))
        .collect();
    let origin = graph.origin();
    let start = *index
        .get(&origin)
        .ok_or_else(|| PlannerError::Graph(GraphError::UnknownVertex(origin.to_string())))?;
    if keys[start].1 == VertexKind::Goal {
        return Ok(Policy {
            path: Vec::new(),
            action_at: BTreeMap::new(),
        });
    }

    // Cheapest edge per ordered vertex pair, ties to the smallest action.
    let mut arcs: BTreeMap<(usize, usize), (f64, ActionId)> = BTreeMap::new();
    for e in graph.edges() {
        if e.is_loop() {
            continue;
        }
        let key = (index[&e.src], index[&e.dst]);
        let cand = (e.weight, e.action);
        arcs.entry(key)
            .and_modify(|best| {
                if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    *best = cand;
                }
            })
            .or_insert(cand);
    }
    let mut adjacency: Vec<Vec<(usize, f64, ActionId)>> = vec![Vec::new(); keys.len()];
    for (&(s, d), &(w, a)) in &arcs {
        adjacency[s].push((d, w, a));
    }

    let mut dist = vec![f64::INFINITY; keys.len()];
    let mut pred: Vec<Option<(usize, ActionId)>> = vec![None; keys.len()];
    let mut done = vec![false; keys.len()];
    let mut heap = BinaryHeap::new();
    dist[start] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        idx: start,
    });
    while let Some(HeapEntry { dist: d, idx }) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        if keys[idx].1.is_terminal() {
            continue; // no actions leave a terminal vertex
        }
        for &(next, w, a) in &adjacency[idx] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                pred[next] = Some((idx, a));
                heap.push(HeapEntry {
                    dist: nd,
                    idx: next,
                });
            }
        }
    }

    let goal = keys
        .iter()
        .enumerate()
        .filter(|(i, (_, k))| *k == VertexKind::Goal && dist[*i].is_finite())
        .min_by(|a, b| dist[a.0].total_cmp(&dist[b.0]).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or(PlannerError::GoalUnreachable)?;

    let mut chain = vec![(goal, None::<ActionId>)];
    let mut cur = goal;
    while cur != start {
        let (p, a) = pred[cur].expect("finite distance implies a predecessor");
        chain.push((p, Some(a)));
        cur = p;
    }
    chain.reverse();
    let path: Vec<ActionVector> = chain.iter().map(|&(i, _)| keys[i].0.clone()).collect();
    let mut action_at = BTreeMap::new();
    for pair in chain.windows(2) {
        let (src, action) = pair[0];
        action_at.insert(
            keys[src].0.clone(),
            action.expect("non-goal vertex has an outgoing action"),
        );
    }
    Ok(Policy { path, action_at })
}
