use super::geometry::{Obstacle, PointSet};
use super::World;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Vertex id of grid cell `(row, col)`.
pub fn cell(cols: usize, row: usize, col: usize) -> VertexId {
    VertexId(row * cols + col)
}

/// Unit-spaced grid with vertex `(row, col)` at point `(col, row)`. Neighbouring
/// cells are joined in both directions; `connectivity` 8 adds diagonals.
pub fn build_grid(rows: usize, cols: usize, connectivity: u8, obstacles: Vec<Obstacle>) -> Result<World> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidParameter(format!("grid {rows}x{cols} needs at least two cells")));
    }
    if connectivity != 4 && connectivity != 8 {
        return Err(Error::InvalidParameter(format!("grid connectivity must be 4 or 8, got {connectivity}")));
    }
    let mut coords = PointSet::new(2);
    for r in 0..rows {
        for c in 0..cols {
            coords.push(&[c as f64, r as f64]);
        }
    }
    let mut graph = Graph::with_vertices(rows * cols);
    let mut offsets: Vec<(isize, isize)> = vec![(0, 1), (1, 0)];
    if connectivity == 8 {
        offsets.extend([(1, 1), (1, -1)]);
    }
    for r in 0..rows {
        for c in 0..cols {
            let u = cell(cols, r, c);
            for &(dr, dc) in &offsets {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                    continue;
                }
                let v = cell(cols, nr as usize, nc as usize);
                graph.add_edge(u, v)?;
                graph.add_edge(v, u)?;
            }
        }
    }
    World::geometric(graph, coords, obstacles, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_four_connected() {
        let w = build_grid(2, 2, 4, vec![]).unwrap();
        assert_eq!(w.vertex_count(), 4);
        assert_eq!(w.graph.edge_count(), 8);
        assert!(w.truth.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn blocked_center_cuts_its_edges() {
        let w = build_grid(3, 3, 8, vec![Obstacle::circle(&[1.0, 1.0], 0.25)]).unwrap();
        let center = cell(3, 1, 1);
        for (i, e) in w.graph.edges().iter().enumerate() {
            let through = e.source == center || e.target == center;
            assert_eq!(w.truth[i].is_infinite(), through, "{e}");
        }
        assert_eq!(w.truth.iter().filter(|x| x.is_infinite()).count(), 16);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(build_grid(0, 5, 4, vec![]).is_err());
        assert!(build_grid(1, 1, 4, vec![]).is_err());
        assert!(build_grid(3, 3, 6, vec![]).is_err());
    }

    #[test]
    fn deterministic_serialization() {
        let a = build_grid(5, 4, 8, vec![Obstacle::rect(&[1.5, 1.5], &[2.5, 2.5])]).unwrap();
        let b = build_grid(5, 4, 8, vec![Obstacle::rect(&[1.5, 1.5], &[2.5, 2.5])]).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
