use serde::{Deserialize, Serialize};

use crate::graph::{Cost, VertexId};
use crate::worlds::geometry::PointSet;

/// Scale applied to straight-line estimates. Keeps the heuristic strictly
/// consistent under floating-point rounding of the distance computations.
pub const EUCLIDEAN_SCALE: f64 = 1.0 - 1e-9;

/// Vertex-to-vertex cost-to-go estimate. `estimate(from, to)` bounds the cost of
/// travelling from `from` to `to`; it must be consistent and vanish on the diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    Zero,
    /// Dense table indexed `[from][to]`.
    Matrix(Vec<Vec<Cost>>),
    /// Scaled straight-line distance between vertex coordinates.
    Euclidean(PointSet),
}

impl Heuristic {
    pub fn estimate(&self, from: VertexId, to: VertexId) -> Cost {
        if from == to {
            return 0.0;
        }
        match self {
            Heuristic::Zero => 0.0,
            Heuristic::Matrix(m) => m[from.0][to.0],
            Heuristic::Euclidean(points) => points.distance(from.0, to.0) * EUCLIDEAN_SCALE,
        }
    }

    /// Makes room for a newly added vertex. Euclidean heuristics take its coordinates.
    pub fn push_vertex(&mut self, coords: Option<&[f64]>) {
        match self {
            Heuristic::Zero => {}
            Heuristic::Matrix(m) => {
                // New rows have no information; zero is always admissible.
                for row in m.iter_mut() {
                    row.push(0.0);
                }
                let n = m.len() + 1;
                m.push(vec![0.0; n]);
            }
            Heuristic::Euclidean(points) => {
                let c = coords.expect("euclidean heuristic needs coordinates for new vertices");
                points.push(c);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_zero() {
        let h = Heuristic::Matrix(vec![vec![5.0, 1.0], vec![1.0, 5.0]]);
        assert_eq!(h.estimate(VertexId(0), VertexId(0)), 0.0);
        assert_eq!(h.estimate(VertexId(0), VertexId(1)), 1.0);
    }

    #[test]
    fn euclidean_is_slightly_shrunk() {
        let pts = PointSet::from_points(2, &[[0.0, 0.0], [3.0, 4.0]]);
        let h = Heuristic::Euclidean(pts);
        let d = h.estimate(VertexId(0), VertexId(1));
        assert!(d < 5.0 && d > 5.0 - 1e-8);
    }

    #[test]
    fn matrix_grows_with_zero_rows() {
        let mut h = Heuristic::Matrix(vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        h.push_vertex(None);
        assert_eq!(h.estimate(VertexId(2), VertexId(0)), 0.0);
        assert_eq!(h.estimate(VertexId(0), VertexId(1)), 2.0);
    }
}
