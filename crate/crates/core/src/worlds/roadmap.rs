use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{Obstacle, PointSet};
use super::{halton, Bounds, World};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Halton,
    Uniform { seed: u64 },
}

impl Sampler {
    pub fn sample(&self, n: usize, bounds: &Bounds) -> Vec<Vec<f64>> {
        let dim = bounds.dim();
        let scale = |u: Vec<f64>| -> Vec<f64> {
            u.iter().enumerate().map(|(k, x)| bounds.min[k] + x * (bounds.max[k] - bounds.min[k])).collect()
        };
        match self {
            Sampler::Halton => halton::halton(n, dim).into_iter().map(scale).collect(),
            Sampler::Uniform { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..n).map(|_| scale((0..dim).map(|_| rng.gen::<f64>()).collect())).collect()
            }
        }
    }
}

/// The `k` vertices nearest to `v` (excluding itself), closest first, ties by id.
pub fn nearest(points: &PointSet, v: usize, k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> =
        (0..points.len()).filter(|&u| u != v).map(|u| (points.distance(v, u), u)).collect();
    let k = k.min(d.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < d.len() {
        d.select_nth_unstable_by(k, cmp);
        d.truncate(k);
    }
    d.sort_by(cmp);
    d.into_iter().map(|x| x.1).collect()
}

/// k-nearest-neighbour roadmap over `n` samples. Each vertex gets edges to its
/// `k` nearest vertices; `symmetric` also adds every reverse edge.
pub fn build_roadmap(
    n: usize,
    k: usize,
    sampler: Sampler,
    bounds: Bounds,
    symmetric: bool,
    obstacles: Vec<Obstacle>,
) -> Result<World> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("roadmap needs n >= 2, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("roadmap needs 1 <= k < n, got k={k}, n={n}")));
    }
    bounds.validate()?;
    if bounds.dim() > halton::max_dim() {
        return Err(Error::InvalidParameter(format!("at most {} dimensions supported", halton::max_dim())));
    }
    let mut coords = PointSet::new(bounds.dim());
    for p in sampler.sample(n, &bounds) {
        coords.push(&p);
    }
    let mut graph = Graph::with_vertices(n);
    for u in 0..n {
        for v in nearest(&coords, u, k) {
            let (a, b) = (VertexId(u), VertexId(v));
            if graph.edge_id(a, b).is_none() {
                graph.add_edge(a, b)?;
            }
            if symmetric && graph.edge_id(b, a).is_none() {
                graph.add_edge(b, a)?;
            }
        }
    }
    let mut w = World::geometric(graph, coords, obstacles, symmetric)?;
    w.bounds = Some(bounds);
    w.k = k;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_endpoints_link_to_middle() {
        let mut coords = PointSet::new(1);
        for x in [0.0, 1.0, 2.0] {
            coords.push(&[x]);
        }
        assert_eq!(nearest(&coords, 0, 1), vec![1]);
        assert_eq!(nearest(&coords, 2, 1), vec![1]);
        // equidistant neighbours: smaller id wins
        assert_eq!(nearest(&coords, 1, 1), vec![0]);
    }

    #[test]
    fn halton_roadmap_first_point() {
        let w = build_roadmap(10, 3, Sampler::Halton, Bounds::unit(2), true, vec![]).unwrap();
        assert_eq!(w.point(VertexId(0)).unwrap(), &[0.5, 1.0 / 3.0]);
        for v in w.graph.vertices() {
            assert!(w.graph.out_edges(v).len() >= 3);
        }
    }

    #[test]
    fn same_seed_same_adjacency() {
        let a = build_roadmap(200, 10, Sampler::Uniform { seed: 5 }, Bounds::unit(2), true, vec![]).unwrap();
        let b = build_roadmap(200, 10, Sampler::Uniform { seed: 5 }, Bounds::unit(2), true, vec![]).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = build_roadmap(200, 10, Sampler::Uniform { seed: 6 }, Bounds::unit(2), true, vec![]).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(build_roadmap(5, 5, Sampler::Halton, Bounds::unit(2), true, vec![]).is_err());
        assert!(build_roadmap(5, 0, Sampler::Halton, Bounds::unit(2), true, vec![]).is_err());
        assert!(build_roadmap(1, 1, Sampler::Halton, Bounds::unit(2), true, vec![]).is_err());
    }
}
