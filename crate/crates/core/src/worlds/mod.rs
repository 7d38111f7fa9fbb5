//! Synthetic environments: geometric worlds whose edges are straight segments
//! blocked by obstacles, plus small hand-built fixtures.
//!
//! A world owns the ground truth. Planners get a copy of the heuristic edge
//! weights and true weights through [`World::lazy_weights`] and learn about later
//! changes only through the batches produced by [`World::advance`].

pub mod fixtures;
pub mod geometry;
pub mod grid;
pub mod halton;
pub mod roadmap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{serde_cost, ChangeBatch, Cost, Edge, EdgeId, Graph, VertexId, INF};
use crate::heuristic::Heuristic;
use crate::weights::LazyWeights;
use geometry::{Obstacle, PointSet};

pub use grid::build_grid;
pub use roadmap::{build_roadmap, Sampler};

/// Vertex heuristic kind stored with a world.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexHeuristic {
    Zero,
    /// Straight-line distance between vertex coordinates.
    Euclidean,
    Matrix(Vec<Vec<Cost>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Bounds {
    pub fn unit(dim: usize) -> Self {
        Bounds { min: vec![0.0; dim], max: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    fn validate(&self) -> Result<()> {
        if self.min.len() != self.max.len() || self.min.is_empty() {
            return Err(Error::InvalidParameter("bounds need matching, non-empty min/max".into()));
        }
        if self.min.iter().zip(&self.max).any(|(a, b)| a.partial_cmp(b) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidParameter("bounds must satisfy min < max on every axis".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub graph: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<PointSet>,
    pub edge_heuristic: Vec<Cost>,
    #[serde(with = "serde_cost::vec")]
    pub truth: Vec<Cost>,
    pub vertex_heuristic: VertexHeuristic,
    /// Every edge has its reverse twin; generated changes keep twins in sync.
    pub undirected: bool,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    /// Obstacles of the currently active scene.
    #[serde(default)]
    pub dynamic: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    /// Neighbour count used when wiring densification samples (0 for non-roadmaps).
    #[serde(default)]
    pub k: usize,
}

/// What one epoch did to a world.
#[derive(Clone, Debug, PartialEq)]
pub enum EpochChange {
    Batch(ChangeBatch),
    Densify(DensifyDelta),
}

/// Vertices and edges appended by one densification step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DensifyDelta {
    pub vertices: Vec<(VertexId, Vec<f64>)>,
    /// `(edge, heuristic weight, true weight)`.
    pub edges: Vec<(Edge, Cost, Cost)>,
    /// Vertex count after the step.
    pub q: usize,
}

/// ε₁ schedule for densification, `1 + 5/q`.
pub fn eps1_schedule(q: usize) -> f64 {
    1.0 + 5.0 / q as f64
}

/// ε₂ schedule for densification, `1 + 10/q`.
pub fn eps2_schedule(q: usize) -> f64 {
    1.0 + 10.0 / q as f64
}

/// Epoch-indexed source of graph changes. Epoch 0 is the initial world.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeScript {
    #[default]
    None,
    /// Obstacle sets cycled per epoch: epoch `i` shows `scenes[i % len]`.
    Scenes { scenes: Vec<Vec<Obstacle>> },
    /// Each epoch toggles `floor(fraction * pairs)` random edges (with twins)
    /// between blocked and their geometric weight.
    RandomFraction { fraction: f64, seed: u64 },
    /// Explicit batches; `batches[i]` is applied at epoch `i + 1`.
    Batches { batches: Vec<ChangeBatch> },
    /// Uniform samples added per epoch, wired to their k nearest neighbours.
    Densify { batch_size: usize, seed: u64 },
}

impl ChangeScript {
    pub fn validate(&self, world: &World) -> Result<()> {
        match self {
            ChangeScript::None | ChangeScript::Scenes { .. } => Ok(()),
            ChangeScript::RandomFraction { fraction, .. } => {
                if !(0.0..=1.0).contains(fraction) {
                    return Err(Error::InvalidParameter(format!("change fraction {fraction} outside [0, 1]")));
                }
                Ok(())
            }
            ChangeScript::Batches { batches } => {
                for b in batches {
                    for c in b.iter() {
                        world.graph.require_edge(c.edge)?;
                        crate::graph::validate_weight(c.edge, c.weight)?;
                    }
                }
                Ok(())
            }
            ChangeScript::Densify { batch_size, .. } => {
                if *batch_size == 0 {
                    return Err(Error::InvalidParameter("densification batch size must be positive".into()));
                }
                if world.coords.is_none() || world.bounds.is_none() || world.k == 0 {
                    return Err(Error::InvalidParameter("densification needs a roadmap world".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_densify(&self) -> bool {
        matches!(self, ChangeScript::Densify { .. })
    }
}

fn epoch_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

impl World {
    /// Assembles a world from explicit weights (non-geometric fixtures).
    pub fn from_weights(
        graph: Graph,
        edge_heuristic: Vec<Cost>,
        truth: Vec<Cost>,
        vertex_heuristic: VertexHeuristic,
        undirected: bool,
    ) -> Result<Self> {
        let w = World {
            graph,
            coords: None,
            edge_heuristic,
            truth,
            vertex_heuristic,
            undirected,
            obstacles: Vec::new(),
            dynamic: Vec::new(),
            bounds: None,
            k: 0,
        };
        w.validate()?;
        Ok(w)
    }

    /// Geometric world: heuristic edge weight is the segment length and the true
    /// weight is the length unless an obstacle touches the segment.
    pub fn geometric(graph: Graph, coords: PointSet, obstacles: Vec<Obstacle>, undirected: bool) -> Result<Self> {
        if coords.len() != graph.vertex_count() {
            return Err(Error::InvalidParameter("one coordinate per vertex required".into()));
        }
        let edge_heuristic =
            graph.edges().iter().map(|e| coords.distance(e.source.0, e.target.0)).collect::<Vec<_>>();
        let mut w = World {
            graph,
            coords: Some(coords),
            edge_heuristic,
            truth: Vec::new(),
            vertex_heuristic: VertexHeuristic::Euclidean,
            undirected,
            obstacles,
            dynamic: Vec::new(),
            bounds: None,
            k: 0,
        };
        w.truth = (0..w.graph.edge_count()).map(|i| w.geometric_truth(EdgeId(i))).collect();
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.graph.edge_count();
        if self.edge_heuristic.len() != m || self.truth.len() != m {
            return Err(Error::InvalidParameter(format!("world has {m} edges but weight vectors of different length")));
        }
        for (i, e) in self.graph.edges().iter().enumerate() {
            let h = self.edge_heuristic[i];
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidWeight { edge: *e, weight: h });
            }
            crate::graph::validate_weight(*e, self.truth[i])?;
        }
        if let Some(c) = &self.coords {
            if c.len() != self.graph.vertex_count() {
                return Err(Error::InvalidParameter("one coordinate per vertex required".into()));
            }
        } else if self.vertex_heuristic == VertexHeuristic::Euclidean {
            return Err(Error::InvalidParameter("euclidean heuristic needs coordinates".into()));
        }
        if let VertexHeuristic::Matrix(mat) = &self.vertex_heuristic {
            let n = self.graph.vertex_count();
            if mat.len() != n || mat.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidParameter("heuristic matrix must be n x n".into()));
            }
        }
        if let Some(b) = &self.bounds {
            b.validate()?;
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn heuristic(&self) -> Heuristic {
        match &self.vertex_heuristic {
            VertexHeuristic::Zero => Heuristic::Zero,
            VertexHeuristic::Matrix(m) => Heuristic::Matrix(m.clone()),
            VertexHeuristic::Euclidean => Heuristic::Euclidean(self.coords.clone().expect("validated")),
        }
    }

    /// Fresh lazy weight store (nothing evaluated) for a planner.
    pub fn lazy_weights(&self, inflation: f64) -> Result<LazyWeights> {
        LazyWeights::new(self.edge_heuristic.clone(), self.truth.clone(), inflation)
    }

    pub fn point(&self, v: VertexId) -> Option<&[f64]> {
        self.coords.as_ref().map(|c| c.point(v.0))
    }

    fn blocked(&self, a: &[f64], b: &[f64]) -> bool {
        self.obstacles.iter().chain(&self.dynamic).any(|o| o.intersects_segment(a, b))
    }

    fn point_blocked(&self, p: &[f64]) -> bool {
        self.obstacles.iter().chain(&self.dynamic).any(|o| o.contains(p))
    }

    /// True weight implied by the geometry and the active obstacles.
    pub fn geometric_truth(&self, id: EdgeId) -> Cost {
        let Some(c) = &self.coords else { return self.truth[id.0] };
        let e = self.graph.edge(id);
        let (a, b) = (c.point(e.source.0), c.point(e.target.0));
        if self.blocked(a, b) {
            INF
        } else {
            self.edge_heuristic[id.0]
        }
    }

    /// Activates an obstacle scene and returns the resulting weight changes
    /// (already applied to the world).
    pub fn set_scene(&mut self, scene: &[Obstacle]) -> ChangeBatch {
        self.dynamic = scene.to_vec();
        let mut batch = ChangeBatch::new();
        for i in 0..self.graph.edge_count() {
            let w = self.geometric_truth(EdgeId(i));
            if w != self.truth[i] {
                self.truth[i] = w;
                batch.push(self.graph.edge(EdgeId(i)), w);
            }
        }
        batch
    }

    /// Installs the weights of `batch`.
    pub fn apply_batch(&mut self, batch: &ChangeBatch) -> Result<()> {
        let mut ids = Vec::with_capacity(batch.len());
        for c in batch.iter() {
            ids.push(self.graph.require_edge(c.edge)?);
            crate::graph::validate_weight(c.edge, c.weight)?;
        }
        for (c, id) in batch.iter().zip(ids) {
            self.truth[id.0] = c.weight;
        }
        Ok(())
    }

    /// Canonical edge list for random changes: one representative per twin pair
    /// (`source < target`) in undirected worlds, every edge otherwise.
    fn change_units(&self) -> Vec<EdgeId> {
        (0..self.graph.edge_count())
            .map(EdgeId)
            .filter(|&id| {
                let e = self.graph.edge(id);
                !self.undirected || e.source < e.target
            })
            .collect()
    }

    fn random_fraction_batch(&self, fraction: f64, seed: u64, epoch: usize) -> ChangeBatch {
        let units = self.change_units();
        let count = (fraction * units.len() as f64).floor() as usize;
        let mut batch = ChangeBatch::new();
        if count == 0 {
            return batch;
        }
        let mut rng = epoch_rng(seed, epoch);
        let mut picked = sample(&mut rng, units.len(), count).into_vec();
        picked.sort_unstable();
        for i in picked {
            let id = units[i];
            let new = if self.truth[id.0].is_infinite() { self.geometric_truth(id) } else { INF };
            let e = self.graph.edge(id);
            batch.push(e, new);
            if self.undirected && self.graph.edge_id(e.target, e.source).is_some() {
                batch.push(e.reversed(), new);
            }
        }
        batch
    }

    /// Change batch `script` produces at `epoch`, without applying it.
    pub fn script_change(&self, script: &ChangeScript, epoch: usize) -> Result<ChangeBatch> {
        if epoch == 0 {
            return Ok(ChangeBatch::new());
        }
        Ok(match script {
            ChangeScript::None | ChangeScript::Densify { .. } => ChangeBatch::new(),
            ChangeScript::Scenes { scenes } => {
                if scenes.is_empty() {
                    return Ok(ChangeBatch::new());
                }
                let mut probe = self.clone();
                probe.set_scene(&scenes[epoch % scenes.len()])
            }
            ChangeScript::RandomFraction { fraction, seed } => self.random_fraction_batch(*fraction, *seed, epoch),
            ChangeScript::Batches { batches } => batches.get(epoch - 1).cloned().unwrap_or_default(),
        })
    }

    /// Prepares epoch 0 of `script` (activates the first scene).
    pub fn start_script(&mut self, script: &ChangeScript) {
        if let ChangeScript::Scenes { scenes } = script {
            if let Some(first) = scenes.first() {
                self.set_scene(first);
            }
        }
    }

    /// Moves the world to `epoch` and reports what changed.
    pub fn advance(&mut self, script: &ChangeScript, epoch: usize) -> Result<EpochChange> {
        match script {
            ChangeScript::Densify { batch_size, seed } if epoch > 0 => {
                let mut rng = epoch_rng(*seed, epoch);
                Ok(EpochChange::Densify(self.densify(*batch_size, &mut rng)?))
            }
            ChangeScript::Scenes { scenes } if epoch > 0 && !scenes.is_empty() => {
                Ok(EpochChange::Batch(self.set_scene(&scenes[epoch % scenes.len()])))
            }
            _ => {
                let batch = self.script_change(script, epoch)?;
                self.apply_batch(&batch)?;
                Ok(EpochChange::Batch(batch))
            }
        }
    }

    /// Adds `batch_size` uniform samples (rejecting points inside obstacles) and
    /// connects each to its `k` nearest vertices in both directions. Existing
    /// edges are left untouched.
    pub fn densify(&mut self, batch_size: usize, rng: &mut impl Rng) -> Result<DensifyDelta> {
        let bounds = self.bounds.clone().ok_or_else(|| Error::InvalidParameter("densify needs bounds".into()))?;
        if self.coords.is_none() || self.k == 0 {
            return Err(Error::InvalidParameter("densify needs a roadmap world".into()));
        }
        let mut delta = DensifyDelta::default();
        let mut attempts = 0usize;
        while delta.vertices.len() < batch_size {
            attempts += 1;
            if attempts > batch_size * 1000 {
                return Err(Error::InvalidParameter("free space too small to place densification samples".into()));
            }
            let p: Vec<f64> = bounds.min.iter().zip(&bounds.max).map(|(lo, hi)| rng.gen_range(*lo..*hi)).collect();
            if self.point_blocked(&p) {
                continue;
            }
            let v = self.graph.add_vertex();
            self.coords.as_mut().unwrap().push(&p);
            delta.vertices.push((v, p));
        }
        let k = self.k;
        for (v, _) in delta.vertices.clone() {
            let coords = self.coords.as_ref().unwrap();
            for u in roadmap::nearest(coords, v.0, k) {
                for (a, b) in [(v, VertexId(u)), (VertexId(u), v)] {
                    if self.graph.edge_id(a, b).is_some() {
                        continue;
                    }
                    let id = self.graph.add_edge(a, b)?;
                    let len = self.coords.as_ref().unwrap().distance(a.0, b.0);
                    self.edge_heuristic.push(len);
                    self.truth.push(len);
                    let w = self.geometric_truth(id);
                    self.truth[id.0] = w;
                    delta.edges.push((Edge { source: a, target: b }, len, w));
                }
            }
        }
        delta.q = self.graph.vertex_count();
        Ok(delta)
    }

    /// Number of edges with `ŵ > w`.
    pub fn audit_admissible(&self) -> usize {
        self.edge_heuristic.iter().zip(&self.truth).filter(|(h, w)| h > w).count()
    }

    /// Number of edges `(u, v)` violating `h(u, t) <= w(u, v) + h(v, t)` for the
    /// given target, where `w` is the heuristic edge weight (a lower bound on
    /// every true weight the edge can take).
    pub fn audit_consistency(&self, target: VertexId) -> usize {
        let h = self.heuristic();
        self.graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, e)| h.estimate(e.source, target) > self.edge_heuristic[*i] + h.estimate(e.target, target))
            .count()
    }

    /// Vertex whose coordinates are closest to `p` (ties by id).
    pub fn nearest_vertex(&self, p: &[f64]) -> Option<VertexId> {
        let c = self.coords.as_ref()?;
        (0..c.len())
            .map(|i| (geometry::distance(c.point(i), p), i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, i)| VertexId(i))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_at_q_100() {
        assert_eq!(eps1_schedule(100), 1.05);
        assert_eq!(eps2_schedule(100), 1.1);
        assert!(eps1_schedule(200) < eps1_schedule(100));
    }

    #[test]
    fn random_fraction_counts_round_down() {
        // 5 x 6 grid, 4-connected: 25 + 24 = 49 undirected pairs, 98 directed edges
        let w = build_grid(5, 6, 4, vec![]).unwrap();
        assert_eq!(w.graph.edge_count(), 98);
        let s = ChangeScript::RandomFraction { fraction: 0.1, seed: 3 };
        let b = w.script_change(&s, 1).unwrap();
        assert_eq!(b.len(), 8);
        let z = ChangeScript::RandomFraction { fraction: 0.0, seed: 3 };
        assert!(w.script_change(&z, 1).unwrap().is_empty());
    }

    #[test]
    fn random_fraction_keeps_twins_together() {
        let w = build_grid(6, 6, 8, vec![]).unwrap();
        let s = ChangeScript::RandomFraction { fraction: 0.2, seed: 11 };
        let b = w.script_change(&s, 2).unwrap();
        let set: std::collections::HashSet<_> = b.iter().map(|c| c.edge).collect();
        for c in b.iter() {
            assert!(set.contains(&c.edge.reversed()));
        }
        assert_eq!(b, w.script_change(&s, 2).unwrap());
        assert_ne!(b, w.script_change(&s, 3).unwrap());
    }

    #[test]
    fn scenes_cycle_and_revert() {
        let mut w = build_grid(4, 4, 4, vec![]).unwrap();
        let a = vec![Obstacle::circle(&[1.0, 1.0], 0.2)];
        let b = vec![Obstacle::circle(&[2.0, 2.0], 0.2)];
        let script = ChangeScript::Scenes { scenes: vec![a, b] };
        w.start_script(&script);
        let blocked0 = w.truth.iter().filter(|x| x.is_infinite()).count();
        assert_eq!(blocked0, 8);
        let EpochChange::Batch(b1) = w.advance(&script, 1).unwrap() else { panic!() };
        assert_eq!(b1.len(), 16);
        let EpochChange::Batch(b2) = w.advance(&script, 2).unwrap() else { panic!() };
        assert_eq!(b2.len(), 16);
        assert_eq!(w.audit_admissible(), 0);
    }

    #[test]
    fn densify_adds_exact_batch() {
        let mut w = build_roadmap(50, 5, Sampler::Halton, Bounds::unit(2), true, vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = w.densify(100, &mut rng).unwrap();
        assert_eq!(d.vertices.len(), 100);
        assert_eq!(d.q, 150);
        assert!(d.edges.len() >= 100 * 5);
        assert_eq!(w.graph.edge_count(), w.truth.len());
        assert_eq!(w.audit_admissible(), 0);
    }

    #[test]
    fn densify_rejects_blocked_samples() {
        let obs = vec![Obstacle::rect(&[0.0, 0.0], &[0.5, 1.0])];
        let mut w = build_roadmap(30, 4, Sampler::Halton, Bounds::unit(2), true, obs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = w.densify(40, &mut rng).unwrap();
        assert!(d.vertices.iter().all(|(_, p)| p[0] > 0.5));
    }

    #[test]
    fn euclidean_worlds_are_consistent() {
        let w = build_roadmap(120, 6, Sampler::Uniform { seed: 4 }, Bounds::unit(2), true, vec![]).unwrap();
        for t in [0, 17, 119] {
            assert_eq!(w.audit_consistency(VertexId(t)), 0);
        }
    }

    #[test]
    fn json_round_trip_keeps_infinity() {
        let mut w = build_grid(3, 3, 8, vec![]).unwrap();
        w.set_scene(&[Obstacle::circle(&[1.0, 1.0], 0.25)]);
        let s = w.to_json().unwrap();
        let back: World = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
}
