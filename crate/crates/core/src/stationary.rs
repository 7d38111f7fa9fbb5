//! Fixed start/goal planners: L-GLS and its bounded variant B-LGLS, plus the
//! configurations that turn the same loop into LPA*, TLPA* and from-scratch GLS.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ChangeBatch, Cost, EdgeId, VertexId, INF};
use crate::kernel::{Direction, Event, Path, RepairOutcome, SearchKernel};
use crate::stats::QueryStats;
use crate::worlds::{DensifyDelta, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationPolicy {
    /// Evaluate only edges on candidate paths.
    Lazy,
    /// Evaluate every edge the moment its weight is read, and every changed edge on arrival.
    Eager,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub event: Event,
    pub eps1: f64,
    pub eps2: f64,
    pub policy: EvaluationPolicy,
    /// Apply truncation with `eps2` (bounded variants).
    pub truncate: bool,
    /// Forget the tree and all evaluations before every query.
    pub reset_between_queries: bool,
}

impl PlannerConfig {
    pub fn lgls(event: Event) -> Self {
        PlannerConfig {
            event,
            eps1: 1.0,
            eps2: 1.0,
            policy: EvaluationPolicy::Lazy,
            truncate: false,
            reset_between_queries: false,
        }
    }

    pub fn blgls(event: Event, eps1: f64, eps2: f64) -> Self {
        PlannerConfig { eps1, eps2, truncate: true, ..Self::lgls(event) }
    }

    pub fn gls(event: Event) -> Self {
        PlannerConfig { reset_between_queries: true, ..Self::lgls(event) }
    }

    pub fn lpa() -> Self {
        PlannerConfig { policy: EvaluationPolicy::Eager, ..Self::lgls(Event::ShortestPath) }
    }

    pub fn tlpa(eps2: f64) -> Self {
        PlannerConfig { eps2, truncate: true, ..Self::lpa() }
    }

    /// Checks the parameters and forces ε₁ = 1 for eager policies.
    pub fn normalized(&self) -> Result<Self> {
        self.event.validate()?;
        for (name, e) in [("ε₁", self.eps1), ("ε₂", self.eps2)] {
            if !(e >= 1.0 && e.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {e} must be finite and >= 1")));
            }
        }
        let mut c = self.clone();
        if c.policy == EvaluationPolicy::Eager {
            c.eps1 = 1.0;
        }
        if !c.truncate {
            c.eps2 = 1.0;
        }
        Ok(c)
    }

    pub fn bound(&self) -> f64 {
        self.eps1 * self.eps2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult {
    /// Start to goal; empty when no path exists.
    pub path: Path,
    pub cost: Cost,
    pub stats: QueryStats,
}

#[derive(Clone, Debug)]
pub struct StationaryPlanner {
    kernel: SearchKernel,
    config: PlannerConfig,
    start: VertexId,
    goal: VertexId,
    queries: u64,
}

/// Runs repair/evaluate rounds until a fully evaluated path reaches the kernel target.
pub(crate) fn solve_rounds(kernel: &mut SearchKernel, event: Event) -> Result<(Option<Path>, u64)> {
    let limit = kernel.graph().edge_count() as u64 + 1;
    let mut rounds = 0u64;
    loop {
        rounds += 1;
        let path = match kernel.repair(event)? {
            RepairOutcome::NoPath => {
                kernel.clear_truncated();
                return Ok((None, rounds));
            }
            RepairOutcome::Path(p) => p,
        };
        let changed = kernel.evaluate_edges(&path)?;
        kernel.clear_truncated();
        match changed {
            Some(e) => {
                let child = kernel.direction().child_of(e);
                kernel.update_vertex(child);
            }
            None if path.leaf() == Some(kernel.target()) => return Ok((Some(path), rounds)),
            None => {}
        }
        if rounds > limit {
            return Err(Error::Invariant(format!("no termination after {rounds} evaluation rounds")));
        }
    }
}

/// Checks the returned path is fully evaluated and returns its true cost.
pub(crate) fn certified_cost(kernel: &SearchKernel, path: &Path) -> Result<Cost> {
    let ids = kernel.path_edge_ids(path)?;
    if let Some(e) = ids.iter().find(|&&e| !kernel.weights().is_evaluated(e)) {
        return Err(Error::Invariant(format!("returned path uses unevaluated edge {}", kernel.graph().edge(*e))));
    }
    Ok(kernel.true_path_cost(path))
}

pub(crate) fn apply_densify(kernel: &mut SearchKernel, delta: &DensifyDelta) -> Result<()> {
    for (v, p) in &delta.vertices {
        let got = kernel.add_vertex(Some(p));
        if got != *v {
            return Err(Error::Invariant(format!("densify vertex {v} arrived as {got}")));
        }
    }
    for &(e, h, w) in &delta.edges {
        kernel.add_edge(e, h, w)?;
    }
    Ok(())
}

impl StationaryPlanner {
    pub fn new(world: &World, start: VertexId, goal: VertexId, config: PlannerConfig) -> Result<Self> {
        let config = config.normalized()?;
        let weights = world.lazy_weights(config.eps1)?;
        let kernel = SearchKernel::new(
            world.graph.clone(),
            weights,
            world.heuristic(),
            Direction::Forward,
            start,
            goal,
            config.policy == EvaluationPolicy::Eager,
            config.truncate.then_some(config.eps2),
        )?;
        Ok(StationaryPlanner { kernel, config, start, goal, queries: 0 })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn kernel(&self) -> &SearchKernel {
        &self.kernel
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn goal(&self) -> VertexId {
        self.goal
    }

    pub fn eval_count(&self) -> u64 {
        self.kernel.weights().eval_count()
    }

    pub fn expansion_count(&self) -> u64 {
        self.kernel.counters().expansions
    }

    /// Artificial cost added to every edge evaluation.
    pub fn set_eval_delay(&mut self, delay: std::time::Duration) {
        self.kernel.weights_mut().set_eval_delay(delay);
    }

    /// Evaluates every edge (a fully known graph). Safe between queries.
    pub fn pre_evaluate_all(&mut self) {
        self.kernel.evaluate_all();
    }

    pub fn solve_query(&mut self) -> Result<QueryResult> {
        let evals0 = self.eval_count();
        let exp0 = self.expansion_count();
        let t0 = Instant::now();
        if self.config.reset_between_queries && self.queries > 0 {
            self.kernel.weights_mut().reset_evaluations();
            self.kernel.reset_tree();
        }
        self.queries += 1;
        if self.start == self.goal {
            return Ok(QueryResult { path: Path::single(self.start), cost: 0.0, stats: QueryStats::default() });
        }
        self.kernel.reset_max_pops();
        let (path, rounds) = solve_rounds(&mut self.kernel, self.config.event)?;
        let elapsed = t0.elapsed().as_micros() as u64;
        let (path, cost) = match path {
            Some(p) => {
                let c = certified_cost(&self.kernel, &p)?;
                (p, c)
            }
            None => (Path::default(), INF),
        };
        Ok(QueryResult {
            path,
            cost,
            stats: QueryStats {
                edge_evaluations: self.eval_count() - evals0,
                vertex_expansions: self.expansion_count() - exp0,
                rounds,
                max_pops_in_call: self.kernel.counters().max_pops_in_call,
                wall_time_us: elapsed,
            },
        })
    }

    /// Installs new true weights. Lazy planners only revert the changed edges;
    /// eager planners evaluate each of them right away.
    pub fn apply_changes(&mut self, batch: &ChangeBatch) -> Result<()> {
        self.kernel.apply_changes(batch)
    }

    pub fn apply_densify(&mut self, delta: &DensifyDelta) -> Result<()> {
        apply_densify(&mut self.kernel, delta)
    }

    /// Switches ε₁/ε₂ (densification schedules). Ignored parts: ε₁ for eager
    /// policies, ε₂ without truncation.
    pub fn set_epsilons(&mut self, eps1: f64, eps2: f64) -> Result<()> {
        if self.config.policy == EvaluationPolicy::Lazy {
            self.kernel.set_inflation(eps1)?;
            self.config.eps1 = eps1;
        }
        if self.config.truncate {
            self.kernel.set_truncation(Some(eps2))?;
            self.config.eps2 = eps2;
        }
        Ok(())
    }

    /// Lazy weight of edge `id`.
    pub fn lazy(&self, id: EdgeId) -> Cost {
        self.kernel.weights().lazy(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::worlds::fixtures::{self, A, B, G, S};

    fn lgls(w: &World) -> StationaryPlanner {
        StationaryPlanner::new(w, S, G, PlannerConfig::lgls(Event::ShortestPath)).unwrap()
    }

    #[test]
    fn diamond_initial_query() {
        let w = fixtures::diamond4();
        let mut p = lgls(&w);
        let r = p.solve_query().unwrap();
        assert_eq!(r.path.vertices, vec![S, A, G]);
        assert_eq!(r.cost, 2.0);
        assert_eq!(r.stats.edge_evaluations, 2);
    }

    #[test]
    fn pre_evaluation_between_queries() {
        let mut w = fixtures::diamond4();
        let mut p = lgls(&w);
        p.solve_query().unwrap();
        let mut batch = ChangeBatch::new();
        batch.push(Edge::new(1, 3), 10.0);
        w.apply_batch(&batch).unwrap();
        p.apply_changes(&batch).unwrap();
        p.pre_evaluate_all();
        let r = p.solve_query().unwrap();
        assert_eq!(r.cost, 6.0);
        assert_eq!(r.stats.edge_evaluations, 0);
    }

    #[test]
    fn diamond_after_change() {
        let mut w = fixtures::diamond4();
        let mut p = lgls(&w);
        p.solve_query().unwrap();
        let mut batch = ChangeBatch::new();
        batch.push(Edge::new(1, 3), 10.0);
        w.apply_batch(&batch).unwrap();
        let before = p.eval_count();
        p.apply_changes(&batch).unwrap();
        assert_eq!(p.eval_count(), before, "lazy change application evaluates nothing");
        let r = p.solve_query().unwrap();
        assert_eq!(r.path.vertices, vec![S, B, G]);
        assert_eq!(r.cost, 6.0);
        assert_eq!(r.cost, crate::oracle::dijkstra_opt(&w, S, G).cost);
    }

    #[test]
    fn eager_change_evaluates_each_edge() {
        let w = crate::worlds::build_grid(4, 4, 4, vec![]).unwrap();
        let mut p = StationaryPlanner::new(&w, VertexId(0), VertexId(15), PlannerConfig::lpa()).unwrap();
        let batch: ChangeBatch = w.graph.edges()[..7].iter().map(|&e| (e, 2.0)).collect();
        p.apply_changes(&batch).unwrap();
        assert_eq!(p.eval_count(), 7);
    }

    #[test]
    fn rule1_boundary_returns_without_expansions() {
        let w = fixtures::rule1_boundary();
        let mut p = StationaryPlanner::new(&w, S, G, PlannerConfig::tlpa(1.2)).unwrap();
        let r = p.solve_query().unwrap();
        assert_eq!(r.path.vertices, vec![S, A, G]);
        assert_eq!(r.cost, 6.0);
        let mut batch = ChangeBatch::new();
        batch.push(Edge::new(0, 2), 4.0);
        p.apply_changes(&batch).unwrap();
        assert_eq!(p.kernel().queue().key_of(B).map(|k| (k.k1, k.k2)), Some((5.0, 4.0)));
        let r = p.solve_query().unwrap();
        assert_eq!(r.stats.vertex_expansions, 0);
        assert_eq!(r.path.vertices, vec![S, A, G]);
        assert_eq!(p.kernel().counters().rule1_returns, 2);
    }

    #[test]
    fn identical_start_and_goal() {
        let w = fixtures::diamond4();
        let mut p = StationaryPlanner::new(&w, A, A, PlannerConfig::lgls(Event::ShortestPath)).unwrap();
        let r = p.solve_query().unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.path.len(), 1);
        assert_eq!(r.stats.vertex_expansions, 0);
    }

    #[test]
    fn unreachable_goal() {
        let mut w = fixtures::diamond4();
        w.truth[2] = INF;
        w.truth[3] = INF;
        let mut p = lgls(&w);
        let r = p.solve_query().unwrap();
        assert!(r.cost.is_infinite());
        assert!(r.path.is_empty());
    }

    #[test]
    fn constant_depth_matches_shortest_path_cost() {
        let w = fixtures::chain3();
        for alpha in 1..4 {
            let mut p =
                StationaryPlanner::new(&w, VertexId(0), VertexId(3), PlannerConfig::lgls(Event::ConstantDepth(alpha)))
                    .unwrap();
            assert_eq!(p.solve_query().unwrap().cost, 6.0);
        }
    }

    #[test]
    fn gls_reset_reevaluates() {
        let w = fixtures::diamond4();
        let mut p = StationaryPlanner::new(&w, S, G, PlannerConfig::gls(Event::ShortestPath)).unwrap();
        assert_eq!(p.solve_query().unwrap().stats.edge_evaluations, 2);
        let r = p.solve_query().unwrap();
        assert_eq!(r.stats.edge_evaluations, 2);
        assert_eq!(r.cost, 2.0);
        let mut l = lgls(&w);
        l.solve_query().unwrap();
        assert_eq!(l.solve_query().unwrap().stats.edge_evaluations, 0);
    }

    #[test]
    fn eager_forces_unit_inflation() {
        let c = PlannerConfig { eps1: 2.0, ..PlannerConfig::lpa() }.normalized().unwrap();
        assert_eq!(c.eps1, 1.0);
        assert!(PlannerConfig::blgls(Event::ConstantDepth(0), 1.0, 1.0).normalized().is_err());
        assert!(PlannerConfig::blgls(Event::ShortestPath, 0.5, 1.0).normalized().is_err());
    }
}
