//! Small hand-checked worlds used by tests and examples.

use super::{VertexHeuristic, World};
use crate::graph::{Cost, Edge, Graph, VertexId};

pub const S: VertexId = VertexId(0);
pub const A: VertexId = VertexId(1);
pub const B: VertexId = VertexId(2);
pub const G: VertexId = VertexId(3);

fn build(n: usize, edges: &[(usize, usize, Cost, Cost)], h: VertexHeuristic) -> World {
    let mut graph = Graph::with_vertices(n);
    let mut hat = Vec::new();
    let mut truth = Vec::new();
    for &(u, v, hw, w) in edges {
        graph.add_edge(VertexId(u), VertexId(v)).unwrap();
        hat.push(hw);
        truth.push(w);
    }
    World::from_weights(graph, hat, truth, h, false).unwrap()
}

/// Four vertices `s=0, a=1, b=2, g=3` with edges
/// `s→a (ŵ 1, w 1)`, `s→b (ŵ 2, w 5)`, `a→g (ŵ 1, w 1)`, `b→g (ŵ 1, w 1)`.
/// The vertex heuristic is the shortest undirected distance under ŵ.
pub fn diamond4() -> World {
    let d = vec![
        vec![0.0, 1.0, 2.0, 2.0],
        vec![1.0, 0.0, 2.0, 1.0],
        vec![2.0, 2.0, 0.0, 1.0],
        vec![2.0, 1.0, 1.0, 0.0],
    ];
    build(4, &[(0, 1, 1.0, 1.0), (0, 2, 2.0, 5.0), (1, 3, 1.0, 1.0), (2, 3, 1.0, 1.0)], VertexHeuristic::Matrix(d))
}

/// [`diamond4`] with every edge mirrored (the shape moving planners need).
pub fn diamond4_undirected() -> World {
    let base = diamond4();
    let mut graph = Graph::with_vertices(4);
    let mut hat = Vec::new();
    let mut truth = Vec::new();
    for (i, e) in base.graph.edges().iter().enumerate() {
        for (s, t) in [(e.source, e.target), (e.target, e.source)] {
            graph.add_edge(s, t).unwrap();
            hat.push(base.edge_heuristic[i]);
            truth.push(base.truth[i]);
        }
    }
    World::from_weights(graph, hat, truth, base.vertex_heuristic, true).unwrap()
}

/// Triangle `0→1→2` plus the direct edge `0→2`, all weights 1.
pub fn triangle() -> World {
    build(3, &[(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0), (0, 2, 1.0, 1.0)], VertexHeuristic::Zero)
}

/// Two vertices and no edges.
pub fn disconnected_pair() -> World {
    build(2, &[], VertexHeuristic::Zero)
}

/// Chain `0→1→2→3` with ŵ 1 everywhere and true weights 1, 1, 4.
pub fn chain3() -> World {
    build(4, &[(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0), (2, 3, 1.0, 4.0)], VertexHeuristic::Zero)
}

/// Geometry where truncation rule 1 holds with equality at ε₂ = 1.2:
/// `s→a` 3, `a→g` 3, `s→b` (ŵ 4, w 10), `b→g` 1.5; `h = (5, 3, 1, 0)` toward `g`.
pub fn rule1_boundary() -> World {
    let h = vec![
        vec![0.0, 3.0, 4.0, 5.0],
        vec![3.0, 0.0, 4.0, 3.0],
        vec![4.0, 4.0, 0.0, 1.0],
        vec![5.0, 3.0, 1.0, 0.0],
    ];
    build(4, &[(0, 1, 3.0, 3.0), (1, 3, 3.0, 3.0), (0, 2, 4.0, 10.0), (2, 3, 1.5, 1.5)], VertexHeuristic::Matrix(h))
}

pub fn edge(u: VertexId, v: VertexId) -> Edge {
    Edge { source: u, target: v }
}
