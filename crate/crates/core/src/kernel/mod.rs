//! Shared incremental repair machinery.
//!
//! One [`SearchKernel`] implements the lazy LPA*-style tree used by every planner
//! in this crate. The same loop serves forward trees (rooted at a fixed start,
//! used by the stationary planners) and reverse trees (rooted at the goal with a
//! key modifier, used by the moving-agent planners). Optional truncation turns
//! the tree into its bounded-suboptimal variant, and the eager flag makes every
//! edge weight read go through the evaluator, which reproduces the classical
//! eager baselines on the same code path.

mod event;
mod path;
mod queue;

use std::cmp::Ordering;

pub use event::Event;
pub use path::{Direction, Path};
pub use queue::RepairQueue;

use crate::error::{Error, Result};
use crate::graph::{ChangeBatch, Cost, Edge, EdgeId, Graph, VertexId, INF};
use crate::heuristic::Heuristic;
use crate::weights::LazyWeights;

/// Two-component priority compared lexicographically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Key {
    pub k1: Cost,
    pub k2: Cost,
}

/// Relative tolerance of [`Key::exceeds`].
const KEY_ROUNDING: Cost = 1e-12;

impl Key {
    pub const INFINITE: Key = Key { k1: INF, k2: INF };

    /// `[min(g, rhs) + h + km ; min(g, rhs)]`.
    pub fn new(g: Cost, rhs: Cost, h: Cost, km: Cost) -> Key {
        let m = g.min(rhs);
        Key { k1: m + h + km, k2: m }
    }

    /// True when `self` is above `other` by more than float rounding. When the
    /// agent steps onto a queued vertex the two sums `(m + h) + km` and
    /// `m + (km + h)` can differ in the last bit.
    pub fn exceeds(&self, other: &Key) -> bool {
        let slack = |a: Cost, b: Cost| KEY_ROUNDING * a.abs().max(b.abs()).max(1.0);
        self.k1 > other.k1 + slack(self.k1, other.k1)
            || (self.k1 >= other.k1 - slack(self.k1, other.k1) && self.k2 > other.k2 + slack(self.k2, other.k2))
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k1.total_cmp(&other.k1).then(self.k2.total_cmp(&other.k2))
    }
}

/// Per-vertex search state.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub g: Cost,
    pub rhs: Cost,
    pub bp: Option<VertexId>,
    pub bp_edge: Option<EdgeId>,
    pub gpi: Cost,
    pub truncated: bool,
    /// Path certified when the vertex was truncated.
    pub frozen_path: Option<Path>,
}

impl Default for NodeRecord {
    fn default() -> Self {
        NodeRecord { g: INF, rhs: INF, bp: None, bp_edge: None, gpi: INF, truncated: false, frozen_path: None }
    }
}

impl NodeRecord {
    pub fn is_consistent(&self) -> bool {
        self.g == self.rhs
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelCounters {
    /// Processed pops (stale-key reinserts excluded).
    pub expansions: u64,
    pub stale_reinserts: u64,
    pub repair_calls: u64,
    /// Largest number of times one vertex was processed within a single repair call.
    pub max_pops_in_call: u32,
    /// Processed pops whose stored key was below the recomputed key (must stay 0).
    pub stale_key_violations: u64,
    /// Constant-depth triggers where the count exceeded α.
    pub depth_overshoots: u64,
    pub truncations: u64,
    pub rule1_returns: u64,
}

/// Result of one repair call.
#[derive(Clone, Debug, PartialEq)]
pub enum RepairOutcome {
    /// Candidate path from the root; its leaf is either the target or the vertex that triggered the event.
    Path(Path),
    /// The target is unreachable under the current lazy weights.
    NoPath,
}

#[derive(Clone, Debug)]
pub struct SearchKernel {
    graph: Graph,
    weights: LazyWeights,
    heuristic: Heuristic,
    direction: Direction,
    root: VertexId,
    target: VertexId,
    km: Cost,
    nodes: Vec<NodeRecord>,
    queue: RepairQueue,
    truncated: Vec<VertexId>,
    truncation: Option<f64>,
    eager: bool,
    counters: KernelCounters,
    call_pops: Vec<u32>,
    call_touched: Vec<VertexId>,
    stamp: Vec<u32>,
    stamp_gen: u32,
}

impl SearchKernel {
    /// `truncation` is ε₂ for the bounded variant (`None` disables both truncation rules).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: Graph,
        weights: LazyWeights,
        heuristic: Heuristic,
        direction: Direction,
        root: VertexId,
        target: VertexId,
        eager: bool,
        truncation: Option<f64>,
    ) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edge_count()
            )));
        }
        for v in [root, target] {
            if !graph.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        if let Some(eps2) = truncation {
            check_factor("ε₂", eps2)?;
        }
        let n = graph.vertex_count();
        let mut k = SearchKernel {
            graph,
            weights,
            heuristic,
            direction,
            root,
            target,
            km: 0.0,
            nodes: Vec::new(),
            queue: RepairQueue::with_vertices(n),
            truncated: Vec::new(),
            truncation,
            eager,
            counters: KernelCounters::default(),
            call_pops: vec![0; n],
            call_touched: Vec::new(),
            stamp: vec![0; n],
            stamp_gen: 0,
        };
        k.reset_tree();
        Ok(k)
    }

    /// Discards the search tree: all records back to ∞, root seeded, queue rebuilt.
    pub fn reset_tree(&mut self) {
        self.nodes = vec![NodeRecord::default(); self.graph.vertex_count()];
        self.queue.clear();
        self.truncated.clear();
        self.km = 0.0;
        let root = &mut self.nodes[self.root.0];
        root.rhs = 0.0;
        root.gpi = 0.0;
        self.update_vertex(self.root);
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &LazyWeights {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut LazyWeights {
        &mut self.weights
    }

    pub fn heuristic(&self) -> &Heuristic {
        &self.heuristic
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn km(&self) -> Cost {
        self.km
    }

    pub fn is_eager(&self) -> bool {
        self.eager
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn set_truncation(&mut self, eps2: Option<f64>) -> Result<()> {
        if let Some(e) = eps2 {
            check_factor("ε₂", e)?;
        }
        self.truncation = eps2;
        Ok(())
    }

    pub fn counters(&self) -> &KernelCounters {
        &self.counters
    }

    /// Restarts the per-call pop maximum (one query may span several repair calls).
    pub fn reset_max_pops(&mut self) {
        self.counters.max_pops_in_call = 0;
    }

    pub fn record(&self, v: VertexId) -> &NodeRecord {
        &self.nodes[v.0]
    }

    pub fn queue(&self) -> &RepairQueue {
        &self.queue
    }

    pub fn truncated_vertices(&self) -> &[VertexId] {
        &self.truncated
    }

    /// Moves the heuristic anchor (the agent position for reverse trees).
    pub fn set_target(&mut self, v: VertexId) -> Result<()> {
        if !self.graph.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        self.target = v;
        Ok(())
    }

    pub fn add_km(&mut self, delta: Cost) {
        debug_assert!(delta >= 0.0);
        self.km += delta;
    }

    /// Heuristic distance between `v` and the target along the tree orientation.
    #[inline]
    pub fn vertex_h(&self, v: VertexId) -> Cost {
        match self.direction {
            Direction::Forward => self.heuristic.estimate(v, self.target),
            Direction::Reverse => self.heuristic.estimate(self.target, v),
        }
    }

    pub fn calculate_key(&self, v: VertexId) -> Key {
        let n = &self.nodes[v.0];
        Key::new(n.g, n.rhs, self.vertex_h(v), self.km)
    }

    #[inline]
    fn children_of(&self, u: VertexId) -> &[(VertexId, EdgeId)] {
        match self.direction {
            Direction::Forward => self.graph.out_edges(u),
            Direction::Reverse => self.graph.in_edges(u),
        }
    }

    /// Recomputes `rhs`/`bp` of `v` from its tree parents and requeues it if inconsistent.
    pub fn update_vertex(&mut self, v: VertexId) {
        if v != self.root {
            let adj = match self.direction {
                Direction::Forward => self.graph.in_edges(v),
                Direction::Reverse => self.graph.out_edges(v),
            };
            let mut best = INF;
            let mut bp = None;
            for &(u, e) in adj {
                let gu = self.nodes[u.0].g;
                if self.eager && gu < INF && !self.weights.is_evaluated(e) {
                    self.weights.evaluate(e);
                }
                let c = gu + self.weights.lazy(e);
                if c < best {
                    best = c;
                    bp = Some((u, e));
                }
            }
            let rec = &mut self.nodes[v.0];
            rec.rhs = best;
            rec.bp = bp.map(|b| b.0);
            rec.bp_edge = bp.map(|b| b.1);
        }
        self.queue.remove(v);
        let rec = &self.nodes[v.0];
        if rec.g != rec.rhs && !rec.truncated {
            let key = self.calculate_key(v);
            self.queue.insert(v, key);
        }
    }

    fn next_stamp(&mut self) -> u32 {
        if self.stamp.len() < self.nodes.len() {
            self.stamp.resize(self.nodes.len(), 0);
        }
        self.stamp_gen = self.stamp_gen.wrapping_add(1);
        if self.stamp_gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp_gen = 1;
        }
        self.stamp_gen
    }

    /// Walks the backpointer chain from `v` toward the root. Stops at the root or at a
    /// truncated vertex (whose frozen path is spliced in). `Err` on cycles or missing links.
    fn walk_chain(&mut self, v: VertexId) -> std::result::Result<(Vec<VertexId>, Option<VertexId>), ()> {
        let gen = self.next_stamp();
        let mut chain = Vec::new();
        let mut cur = v;
        loop {
            if self.nodes[cur.0].truncated && self.nodes[cur.0].frozen_path.is_some() {
                return Ok((chain, Some(cur)));
            }
            if cur == self.root {
                chain.push(cur);
                return Ok((chain, None));
            }
            if self.stamp[cur.0] == gen {
                return Err(());
            }
            self.stamp[cur.0] = gen;
            chain.push(cur);
            match self.nodes[cur.0].bp {
                Some(p) => cur = p,
                None => return Err(()),
            }
        }
    }

    fn tree_edge(&self, parent: VertexId, child: VertexId) -> Option<EdgeId> {
        let e = self.direction.edge(parent, child);
        self.graph.edge_id(e.source, e.target)
    }

    /// Lazy cost of the path `obtain_path(v)` would return, accumulated from the root.
    /// Stores the value as `gpi(v)`; `∞` on a broken or cyclic chain.
    pub fn compute_gpi(&mut self, v: VertexId) -> Cost {
        let cost = match self.walk_chain(v) {
            Err(()) => INF,
            Ok((chain, splice)) => {
                let mut cost = match splice {
                    Some(t) => {
                        let frozen = self.nodes[t.0].frozen_path.as_ref().unwrap();
                        self.lazy_path_cost(frozen)
                    }
                    None => 0.0,
                };
                // chain is leaf-first; accumulate root-first
                let mut parent = splice.unwrap_or_else(|| *chain.last().unwrap());
                let start = if splice.is_some() { chain.len() } else { chain.len() - 1 };
                for i in (0..start).rev() {
                    let child = chain[i];
                    let e = self.nodes[child.0]
                        .bp_edge
                        .filter(|_| self.nodes[child.0].bp == Some(parent))
                        .or_else(|| self.tree_edge(parent, child));
                    cost += e.map_or(INF, |e| self.weights.lazy(e));
                    parent = child;
                }
                cost
            }
        };
        self.nodes[v.0].gpi = cost;
        cost
    }

    /// Lazy cost of a root-anchored path.
    pub fn lazy_path_cost(&self, path: &Path) -> Cost {
        let mut cost = 0.0;
        for w in path.vertices.windows(2) {
            cost += self.tree_edge(w[0], w[1]).map_or(INF, |e| self.weights.lazy(e));
        }
        cost
    }

    /// True cost of a root-anchored path (no evaluation is counted).
    pub fn true_path_cost(&self, path: &Path) -> Cost {
        let mut cost = 0.0;
        for w in path.vertices.windows(2) {
            cost += self.tree_edge(w[0], w[1]).map_or(INF, |e| self.weights.peek_truth(e));
        }
        cost
    }

    /// Backpointer path from the root to `v`, splicing the frozen path of the first
    /// truncated vertex met on the way.
    pub fn obtain_path(&mut self, v: VertexId) -> Result<Path> {
        let (chain, splice) =
            self.walk_chain(v).map_err(|_| Error::Invariant(format!("backpointer chain from {v} does not reach the root")))?;
        let mut vertices = match splice {
            Some(t) => self.nodes[t.0].frozen_path.clone().unwrap().vertices,
            None => Vec::with_capacity(chain.len()),
        };
        vertices.extend(chain.iter().rev());
        Ok(Path::new(vertices))
    }

    /// Edge ids of a root-anchored path, in root-to-leaf order.
    pub fn path_edge_ids(&self, path: &Path) -> Result<Vec<EdgeId>> {
        path.vertices
            .windows(2)
            .map(|w| {
                let e = self.direction.edge(w[0], w[1]);
                self.graph.require_edge(e)
            })
            .collect()
    }

    pub fn event_triggered(&mut self, event: Event, v: VertexId) -> Result<bool> {
        if v == self.target {
            return Ok(true);
        }
        match event {
            Event::ShortestPath => Ok(false),
            Event::ConstantDepth(alpha) => {
                let path = self.obtain_path(v)?;
                let ids = self.path_edge_ids(&path)?;
                let unevaluated = ids.iter().filter(|&&e| !self.weights.is_evaluated(e)).count() as u32;
                if unevaluated > alpha {
                    self.counters.depth_overshoots += 1;
                }
                Ok(unevaluated >= alpha)
            }
        }
    }

    fn begin_call(&mut self) {
        for v in self.call_touched.drain(..) {
            self.call_pops[v.0] = 0;
        }
        if self.call_pops.len() < self.nodes.len() {
            self.call_pops.resize(self.nodes.len(), 0);
        }
        self.counters.repair_calls += 1;
    }

    fn note_processed(&mut self, u: VertexId) {
        self.counters.expansions += 1;
        let c = &mut self.call_pops[u.0];
        if *c == 0 {
            self.call_touched.push(u);
        }
        *c += 1;
        self.counters.max_pops_in_call = self.counters.max_pops_in_call.max(*c);
    }

    fn update_children(&mut self, u: VertexId) {
        for i in 0..self.children_of(u).len() {
            let v = self.children_of(u)[i].0;
            self.update_vertex(v);
        }
    }

    /// Repairs the tree until the target is consistent and no queued key is below
    /// the target's, an event fires, or (bounded variant) the current path to the
    /// target is certified within ε₂ of the queue's lower bound.
    pub fn repair(&mut self, event: Event) -> Result<RepairOutcome> {
        self.begin_call();
        let target = self.target;
        while let Some((u, k_old)) = self.queue.peek() {
            let t = &self.nodes[target.0];
            let target_open = t.g != t.rhs && !t.truncated;
            if !(k_old < self.calculate_key(target) || target_open) {
                break;
            }
            let k_new = self.calculate_key(u);
            if k_old < k_new {
                self.queue.insert(u, k_new);
                self.counters.stale_reinserts += 1;
                continue;
            }
            if k_old.exceeds(&k_new) {
                self.counters.stale_key_violations += 1;
            }
            if let Some(eps2) = self.truncation {
                let gpi_t = self.compute_gpi(target);
                let n = &self.nodes[u.0];
                if gpi_t < INF && gpi_t <= eps2 * (n.g.min(n.rhs) + self.vertex_h(u)) {
                    self.counters.rule1_returns += 1;
                    return Ok(RepairOutcome::Path(self.obtain_path(target)?));
                }
            }
            self.queue.pop();
            self.note_processed(u);
            let n = &self.nodes[u.0];
            if n.g > n.rhs {
                self.nodes[u.0].g = self.nodes[u.0].rhs;
                // Children are updated before the event check so the search can
                // resume from `u` when the evaluation finds nothing new.
                self.update_children(u);
                if self.event_triggered(event, u)? {
                    return Ok(RepairOutcome::Path(self.obtain_path(u)?));
                }
            } else {
                if let Some(eps2) = self.truncation {
                    let gpi_u = self.compute_gpi(u);
                    let h = self.vertex_h(u);
                    let g = self.nodes[u.0].g;
                    if gpi_u + h <= eps2 * (g + h) {
                        self.truncate(u)?;
                        continue;
                    }
                }
                self.nodes[u.0].g = INF;
                self.update_children(u);
                self.update_vertex(u);
            }
        }
        let t = &self.nodes[target.0];
        if t.truncated || t.g < INF {
            Ok(RepairOutcome::Path(self.obtain_path(target)?))
        } else {
            Ok(RepairOutcome::NoPath)
        }
    }

    fn truncate(&mut self, u: VertexId) -> Result<()> {
        let frozen = self.obtain_path(u)?;
        let rec = &mut self.nodes[u.0];
        rec.truncated = true;
        rec.frozen_path = Some(frozen);
        self.truncated.push(u);
        self.counters.truncations += 1;
        Ok(())
    }

    /// Empties the truncated list: each vertex loses its frozen path, `gpi := ∞`,
    /// and is updated so that it re-enters the queue if still inconsistent.
    pub fn clear_truncated(&mut self) {
        let list = std::mem::take(&mut self.truncated);
        for &s in &list {
            let rec = &mut self.nodes[s.0];
            rec.truncated = false;
            rec.frozen_path = None;
            rec.gpi = INF;
        }
        for s in list {
            self.update_vertex(s);
        }
    }

    /// Evaluates the unevaluated edges of `path` (root-first for forward trees,
    /// leaf-first for reverse trees) and returns the first whose value changed.
    pub fn evaluate_edges(&mut self, path: &Path) -> Result<Option<Edge>> {
        let mut ids = self.path_edge_ids(path)?;
        if self.direction == Direction::Reverse {
            ids.reverse();
        }
        for e in ids {
            if self.weights.is_evaluated(e) {
                continue;
            }
            let (_, changed) = self.weights.evaluate(e);
            if changed {
                return Ok(Some(self.graph.edge(e)));
            }
        }
        Ok(None)
    }

    /// Evaluates every edge and repairs the vertices whose lazy weight moved.
    pub fn evaluate_all(&mut self) {
        let mut changed = Vec::new();
        for i in 0..self.graph.edge_count() {
            let e = EdgeId(i);
            if !self.weights.is_evaluated(e) && self.weights.evaluate(e).1 {
                changed.push(self.direction.child_of(self.graph.edge(e)));
            }
        }
        self.clear_truncated();
        for v in changed {
            self.update_vertex(v);
        }
    }

    /// Applies a change batch: changed edges revert to their lazy heuristic weight
    /// (eager kernels evaluate them right away) and dependent vertices are updated.
    pub fn apply_changes(&mut self, batch: &ChangeBatch) -> Result<()> {
        self.weights.apply_change_batch(&self.graph, batch)?;
        if self.eager {
            for c in batch.iter() {
                let id = self.graph.require_edge(c.edge)?;
                self.weights.evaluate(id);
            }
        }
        for c in batch.iter() {
            self.update_vertex(self.direction.child_of(c.edge));
        }
        Ok(())
    }

    /// Changes ε₁ and repairs every vertex that depends on an unevaluated edge.
    pub fn set_inflation(&mut self, eps1: f64) -> Result<()> {
        if eps1 == self.weights.inflation() {
            return Ok(());
        }
        self.weights.set_inflation(eps1)?;
        let gen = self.next_stamp();
        let mut affected = Vec::new();
        for i in 0..self.graph.edge_count() {
            if !self.weights.is_evaluated(EdgeId(i)) {
                let v = self.direction.child_of(self.graph.edge(EdgeId(i)));
                if self.stamp[v.0] != gen {
                    self.stamp[v.0] = gen;
                    affected.push(v);
                }
            }
        }
        affected.sort();
        for v in affected {
            self.update_vertex(v);
        }
        Ok(())
    }

    pub fn add_vertex(&mut self, coords: Option<&[f64]>) -> VertexId {
        let v = self.graph.add_vertex();
        self.heuristic.push_vertex(coords);
        self.nodes.push(NodeRecord::default());
        self.call_pops.push(0);
        self.stamp.push(0);
        v
    }

    /// Adds an unevaluated edge and updates the vertex that depends on it.
    pub fn add_edge(&mut self, edge: Edge, heuristic: Cost, truth: Cost) -> Result<EdgeId> {
        crate::graph::validate_weight(edge, truth)?;
        let id = self.graph.add_edge(edge.source, edge.target)?;
        self.weights.push_edge(heuristic, truth)?;
        self.update_vertex(self.direction.child_of(edge));
        Ok(id)
    }

    /// Number of vertices whose queue membership disagrees with
    /// `g != rhs && !truncated` (full scan).
    pub fn queue_invariant_violations(&self) -> usize {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(i, n)| (n.g != n.rhs && !n.truncated) != self.queue.contains(VertexId(*i)))
            .count()
    }
}

fn check_factor(name: &str, f: f64) -> Result<()> {
    if !(f >= 1.0 && f.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} = {f} must be finite and >= 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
