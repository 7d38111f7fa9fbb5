//! Ground-truth shortest paths on true weights, and bound certification.
//!
//! Both searches fold path costs outward from the tree root, in the same order
//! the planners do, so optimal costs compare equal bit for bit.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{Cost, Graph, VertexId, INF};
use crate::kernel::{Direction, Path};
use crate::worlds::World;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub cost: Cost,
    /// Travel order, `from` first. `None` when unreachable.
    pub path: Option<Path>,
}

impl OracleResult {
    fn unreachable() -> Self {
        OracleResult { cost: INF, path: None }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Item(Cost, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Dijkstra from `root` along `direction` over `weights` (indexed by edge id).
/// Returns distances and tree parents.
pub fn shortest_tree(graph: &Graph, weights: &[Cost], root: VertexId, direction: Direction) -> (Vec<Cost>, Vec<Option<VertexId>>) {
    let n = graph.vertex_count();
    let mut dist = vec![INF; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root.0] = 0.0;
    heap.push(Reverse(Item(0.0, root.0)));
    while let Some(Reverse(Item(d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let adj = match direction {
            Direction::Forward => graph.out_edges(VertexId(u)),
            Direction::Reverse => graph.in_edges(VertexId(u)),
        };
        for &(v, e) in adj {
            let nd = d + weights[e.0];
            if nd < dist[v.0] {
                dist[v.0] = nd;
                parent[v.0] = Some(VertexId(u));
                heap.push(Reverse(Item(nd, v.0)));
            }
        }
    }
    (dist, parent)
}

fn result(dist: &[Cost], parent: &[Option<VertexId>], leaf: VertexId, direction: Direction) -> OracleResult {
    if dist[leaf.0].is_infinite() {
        return OracleResult::unreachable();
    }
    let mut vs = vec![leaf];
    let mut cur = leaf;
    while let Some(p) = parent[cur.0] {
        vs.push(p);
        cur = p;
    }
    if direction == Direction::Forward {
        vs.reverse();
    }
    OracleResult { cost: dist[leaf.0], path: Some(Path::new(vs)) }
}

/// Shortest `s`→`g` path, costs accumulated from `s`.
pub fn dijkstra(graph: &Graph, weights: &[Cost], s: VertexId, g: VertexId) -> OracleResult {
    let (dist, parent) = shortest_tree(graph, weights, s, Direction::Forward);
    result(&dist, &parent, g, Direction::Forward)
}

/// Shortest `from`→`goal` path, costs accumulated from `goal` backwards (the
/// order used by goal-rooted planners).
pub fn dijkstra_to_goal(graph: &Graph, weights: &[Cost], from: VertexId, goal: VertexId) -> OracleResult {
    let (dist, parent) = shortest_tree(graph, weights, goal, Direction::Reverse);
    result(&dist, &parent, from, Direction::Reverse)
}

/// Optimum on the world's current true weights.
pub fn dijkstra_opt(world: &World, s: VertexId, g: VertexId) -> OracleResult {
    dijkstra(&world.graph, &world.truth, s, g)
}

pub fn dijkstra_opt_to_goal(world: &World, from: VertexId, goal: VertexId) -> OracleResult {
    dijkstra_to_goal(&world.graph, &world.truth, from, goal)
}

pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Exhaustive simple-path enumeration (at most [`BRUTE_FORCE_LIMIT`] vertices).
pub fn brute_force(graph: &Graph, weights: &[Cost], s: VertexId, g: VertexId) -> Result<OracleResult> {
    let n = graph.vertex_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidParameter(format!("brute force limited to {BRUTE_FORCE_LIMIT} vertices, got {n}")));
    }
    if s == g {
        return Ok(OracleResult { cost: 0.0, path: Some(Path::single(s)) });
    }
    let mut best = OracleResult::unreachable();
    let mut on_path = vec![false; n];
    let mut stack = vec![s];
    on_path[s.0] = true;
    fn dfs(
        graph: &Graph,
        weights: &[Cost],
        g: VertexId,
        cost: Cost,
        stack: &mut Vec<VertexId>,
        on_path: &mut [bool],
        best: &mut OracleResult,
    ) {
        let u = *stack.last().unwrap();
        if u == g {
            if cost < best.cost {
                *best = OracleResult { cost, path: Some(Path::new(stack.clone())) };
            }
            return;
        }
        for &(v, e) in graph.out_edges(u) {
            if on_path[v.0] {
                continue;
            }
            let c = cost + weights[e.0];
            if c.is_infinite() {
                continue;
            }
            on_path[v.0] = true;
            stack.push(v);
            dfs(graph, weights, g, c, stack, on_path, best);
            stack.pop();
            on_path[v.0] = false;
        }
    }
    dfs(graph, weights, g, 0.0, &mut stack, &mut on_path, &mut best);
    Ok(best)
}

pub fn brute_force_opt(world: &World, s: VertexId, g: VertexId) -> Result<OracleResult> {
    brute_force(&world.graph, &world.truth, s, g)
}

/// `achieved <= ε₁·ε₂·optimal`; two infinite costs agree.
pub fn check_bound(achieved: Cost, optimal: Cost, eps1: f64, eps2: f64) -> bool {
    if achieved.is_infinite() && optimal.is_infinite() {
        return true;
    }
    achieved <= eps1 * eps2 * optimal
}

/// Outcome of certifying one planner answer against the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub within_bound: bool,
    /// The planner reported a cost below the optimum (impossible for a correct planner).
    pub below_optimum: bool,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.within_bound && !self.below_optimum
    }
}

pub fn certify(achieved: Cost, optimal: Cost, eps1: f64, eps2: f64) -> Certificate {
    Certificate { within_bound: check_bound(achieved, optimal, eps1, eps2), below_optimum: achieved < optimal }
}
