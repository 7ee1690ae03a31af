//! Graphviz rendering of compact vector graphs.

use std::fmt::Write;

use crate::vecgraph::{CompactVectorGraph, VertexKind};

/// Render the graph in DOT. Vertices are labelled with their action
/// vector; terminal vertices are drawn as double circles (goals in
/// green, failures in red); edges carry `a:<action> w:<weight>` labels,
/// using `action_names` when provided.
pub fn to_dot(graph: &CompactVectorGraph, action_names: Option<&[String]>) -> String {
    let mut out = String::new();
    out.push_str("digraph vecgraph {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    let mut vertices: Vec<_> = graph.vertices().collect();
    vertices.sort_by(|a, b| a.0.cmp(b.0));
    for (v, kind) in vertices {
        let extras = match kind {
            VertexKind::Normal => String::new(),
            VertexKind::Goal => ", shape=doublecircle, color=green".into(),
            VertexKind::Failure => ", shape=doublecircle, color=red".into(),
        };
        writeln!(out, "  \"{v}\" [label=\"{v}\"{extras}];").expect("write to string");
    }
    let mut edges: Vec<_> = graph.edges().iter().collect();
    edges.sort_by(|a, b| {
        (&a.src, a.action, &a.dst)
            .cmp(&(&b.src, b.action, &b.dst))
            .then(a.weight.total_cmp(&b.weight))
    });
    for e in edges {
        let action = action_names
            .and_then(|names| names.get(e.action.0).cloned())
            .unwrap_or_else(|| e.action.0.to_string());
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"a:{} w:{}\"];",
            e.src, e.dst, action, e.weight
        )
        .expect("write to string");
    }
    out.push_str("}\n");
    out
}
