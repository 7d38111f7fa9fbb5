use serde::{Deserialize, Serialize};

use crate::graph::{Cost, Edge, VertexId};

/// Orientation of the search tree relative to graph edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Tree rooted at the start; a tree step `parent -> child` is the graph edge `(parent, child)`.
    Forward,
    /// Tree rooted at the goal; a tree step `parent -> child` is the graph edge `(child, parent)`.
    Reverse,
}

impl Direction {
    #[inline]
    pub fn edge(self, parent: VertexId, child: VertexId) -> Edge {
        match self {
            Direction::Forward => Edge { source: parent, target: child },
            Direction::Reverse => Edge { source: child, target: parent },
        }
    }

    /// The endpoint of `edge` whose right-hand side depends on it.
    #[inline]
    pub fn child_of(self, edge: Edge) -> VertexId {
        match self {
            Direction::Forward => edge.target,
            Direction::Reverse => edge.source,
        }
    }
}

/// Vertices ordered from the tree root to a leaf.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    pub vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path { vertices }
    }

    pub fn single(v: VertexId) -> Self {
        Path { vertices: vec![v] }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn root(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn leaf(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Graph edges of the path in root-to-leaf order.
    pub fn edges(&self, direction: Direction) -> Vec<Edge> {
        self.vertices.windows(2).map(|w| direction.edge(w[0], w[1])).collect()
    }

    /// Sum of `weight` over the path, accumulated from the root.
    pub fn cost_with(&self, direction: Direction, mut weight: impl FnMut(Edge) -> Cost) -> Cost {
        self.edges(direction).into_iter().fold(0.0, |acc, e| acc + weight(e))
    }

    /// The vertices as travelled by an agent: identical for forward trees, reversed otherwise.
    pub fn travel_order(&self, direction: Direction) -> Vec<VertexId> {
        match direction {
            Direction::Forward => self.vertices.clone(),
            Direction::Reverse => self.vertices.iter().rev().copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_tree_edges_point_toward_root() {
        let p = Path::new(vec![VertexId(3), VertexId(1), VertexId(0)]);
        assert_eq!(p.edges(Direction::Reverse), vec![Edge::new(1, 3), Edge::new(0, 1)]);
        assert_eq!(p.edges(Direction::Forward), vec![Edge::new(3, 1), Edge::new(1, 0)]);
        assert_eq!(p.travel_order(Direction::Reverse), vec![VertexId(0), VertexId(1), VertexId(3)]);
    }

    #[test]
    fn cost_accumulates_from_root() {
        let p = Path::new(vec![VertexId(0), VertexId(1), VertexId(2)]);
        assert_eq!(p.cost_with(Direction::Forward, |_| 1.5), 3.0);
        assert_eq!(Path::single(VertexId(4)).cost_with(Direction::Forward, |_| 1.0), 0.0);
    }
}
