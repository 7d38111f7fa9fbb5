//! Moving-agent planners: GD* and its bounded variant B-GD*, plus the eager
//! D*-Lite and TD* configurations.
//!
//! The tree is rooted at the goal and grows backwards along edges; its target is
//! the agent. Each time the agent moves, the key modifier grows by the heuristic
//! distance moved so queued keys stay valid lower bounds without reordering.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{ChangeBatch, Cost, VertexId, INF};
use crate::kernel::{Direction, Path, SearchKernel};
use crate::stationary::{certified_cost, solve_rounds, EvaluationPolicy, PlannerConfig};
use crate::stats::QueryStats;
use crate::worlds::{ChangeScript, EpochChange, World};

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub current: VertexId,
    /// Position at the last heuristic re-anchor.
    pub last: VertexId,
    pub km: Cost,
    pub trajectory: Vec<VertexId>,
    pub traversed_cost: Cost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    /// Agent to goal, in travel order; empty when no path exists.
    pub path: Path,
    /// Cost of `path`, accumulated from the goal.
    pub cost: Cost,
    pub stats: QueryStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub trajectory: Path,
    pub traversed_cost: Cost,
    pub plans: Vec<PlanResult>,
    pub reached_goal: bool,
}

#[derive(Clone, Debug)]
pub struct MovingPlanner {
    kernel: SearchKernel,
    config: PlannerConfig,
    goal: VertexId,
    agent: AgentState,
    planned: Option<Vec<VertexId>>,
}

impl PlannerConfig {
    pub fn gdstar(event: crate::kernel::Event) -> Self {
        PlannerConfig::lgls(event)
    }

    pub fn bgdstar(event: crate::kernel::Event, eps1: f64, eps2: f64) -> Self {
        PlannerConfig::blgls(event, eps1, eps2)
    }

    pub fn dstar_lite() -> Self {
        PlannerConfig::lpa()
    }

    pub fn tdstar(eps2: f64) -> Self {
        PlannerConfig::tlpa(eps2)
    }
}

impl MovingPlanner {
    pub fn new(world: &World, start: VertexId, goal: VertexId, config: PlannerConfig) -> Result<Self> {
        let config = config.normalized()?;
        if config.reset_between_queries {
            return Err(Error::InvalidParameter("moving planners keep their tree between plans".into()));
        }
        let weights = world.lazy_weights(config.eps1)?;
        let kernel = SearchKernel::new(
            world.graph.clone(),
            weights,
            world.heuristic(),
            Direction::Reverse,
            goal,
            start,
            config.policy == EvaluationPolicy::Eager,
            config.truncate.then_some(config.eps2),
        )?;
        let agent =
            AgentState { current: start, last: start, km: 0.0, trajectory: vec![start], traversed_cost: 0.0 };
        Ok(MovingPlanner { kernel, config, goal, agent, planned: None })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn kernel(&self) -> &SearchKernel {
        &self.kernel
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn goal(&self) -> VertexId {
        self.goal
    }

    pub fn at_goal(&self) -> bool {
        self.agent.current == self.goal
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

    pub fn pre_evaluate_all(&mut self) {
        self.kernel.evaluate_all();
    }

    /// Repairs the goal-rooted tree until the agent's path is fully evaluated.
    pub fn plan(&mut self) -> Result<PlanResult> {
        let evals0 = self.eval_count();
        let exp0 = self.expansion_count();
        let t0 = Instant::now();
        if self.at_goal() {
            self.planned = Some(vec![self.goal]);
            return Ok(PlanResult { path: Path::single(self.goal), cost: 0.0, stats: QueryStats::default() });
        }
        self.kernel.reset_max_pops();
        let (tree_path, rounds) = solve_rounds(&mut self.kernel, self.config.event)?;
        let elapsed = t0.elapsed().as_micros() as u64;
        let (path, cost) = match tree_path {
            Some(p) => {
                let c = certified_cost(&self.kernel, &p)?;
                let travel = p.travel_order(Direction::Reverse);
                self.planned = Some(travel.clone());
                (Path::new(travel), c)
            }
            None => {
                self.planned = None;
                (Path::default(), INF)
            }
        };
        Ok(PlanResult {
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

    /// Moves the agent one edge along the last plan. A no-op at the goal.
    pub fn step(&mut self) -> Result<VertexId> {
        if self.at_goal() {
            return Ok(self.goal);
        }
        let planned = self.planned.take().ok_or_else(|| Error::Usage("step() needs a successful plan() first".into()))?;
        let next = *planned.get(1).ok_or_else(|| Error::Usage("planned path has no next vertex".into()))?;
        let edge = crate::graph::Edge { source: self.agent.current, target: next };
        let id = self.kernel.graph().require_edge(edge)?;
        if !self.kernel.weights().is_evaluated(id) {
            return Err(Error::Invariant(format!("agent about to traverse unevaluated edge {edge}")));
        }
        self.agent.traversed_cost += self.kernel.weights().peek_truth(id);
        let dk = self.kernel.heuristic().estimate(self.agent.last, next);
        self.agent.km += dk;
        self.kernel.add_km(dk);
        self.agent.last = next;
        self.agent.current = next;
        self.agent.trajectory.push(next);
        self.kernel.set_target(next)?;
        Ok(next)
    }

    /// Perceived weight changes. Lazy planners revert the edges; eager ones evaluate them.
    pub fn observe_changes(&mut self, batch: &ChangeBatch) -> Result<()> {
        if !batch.is_empty() {
            self.planned = None;
        }
        self.kernel.apply_changes(batch)
    }

    /// Plans, steps and observes the world's scripted changes until the agent
    /// reaches the goal or no path remains. The change of epoch `i` is observed
    /// after the `i`-th step.
    pub fn run_to_goal(&mut self, world: &mut World, script: &ChangeScript) -> Result<EpisodeResult> {
        if script.is_densify() {
            return Err(Error::Usage("moving planners do not support densification scripts".into()));
        }
        let limit = 4 * world.vertex_count() + 1000;
        let mut plans = Vec::new();
        let mut epoch = 0;
        let reached = loop {
            if self.at_goal() {
                break true;
            }
            let r = self.plan()?;
            let dead = r.cost.is_infinite();
            plans.push(r);
            if dead {
                break false;
            }
            self.step()?;
            epoch += 1;
            if epoch > limit {
                return Err(Error::Invariant(format!("agent did not reach the goal within {limit} steps")));
            }
            if let EpochChange::Batch(b) = world.advance(script, epoch)? {
                self.observe_changes(&b)?;
            }
        };
        Ok(EpisodeResult {
            trajectory: Path::new(self.agent.trajectory.clone()),
            traversed_cost: self.agent.traversed_cost,
            plans,
            reached_goal: reached,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::kernel::Event;
    use crate::oracle::{dijkstra_opt, dijkstra_opt_to_goal};
    use crate::worlds::fixtures::{self, A, B, G, S};
    use crate::worlds::{build_grid, grid::cell};

    #[test]
    fn diamond_reverse_plan_and_step() {
        let w = fixtures::diamond4_undirected();
        let mut p = MovingPlanner::new(&w, S, G, PlannerConfig::gdstar(Event::ShortestPath)).unwrap();
        let r = p.plan().unwrap();
        assert_eq!(r.path.vertices, vec![S, A, G]);
        assert_eq!(r.cost, 2.0);
        assert_eq!(p.step().unwrap(), A);
        assert_eq!(p.agent().traversed_cost, 1.0);
        assert_eq!(p.agent().km, 1.0);
        p.plan().unwrap();
        assert_eq!(p.step().unwrap(), G);
        assert!(p.at_goal());
        assert_eq!(p.step().unwrap(), G);
    }

    #[test]
    fn step_before_plan_is_usage_error() {
        let w = fixtures::diamond4_undirected();
        let mut p = MovingPlanner::new(&w, S, G, PlannerConfig::gdstar(Event::ShortestPath)).unwrap();
        assert!(matches!(p.step(), Err(Error::Usage(_))));
    }

    #[test]
    fn static_world_trajectory_is_optimal() {
        let mut w = build_grid(6, 7, 8, vec![crate::worlds::geometry::Obstacle::rect(&[2.5, 0.5], &[3.5, 4.5])]).unwrap();
        let (s, g) = (cell(7, 0, 0), cell(7, 5, 6));
        let opt = dijkstra_opt(&w, s, g).cost;
        let mut p = MovingPlanner::new(&w, s, g, PlannerConfig::gdstar(Event::ShortestPath)).unwrap();
        let e = p.run_to_goal(&mut w, &ChangeScript::None).unwrap();
        assert!(e.reached_goal);
        assert!((e.traversed_cost - opt).abs() < 1e-9);
        assert_eq!(e.plans[0].cost, dijkstra_opt_to_goal(&w, s, g).cost);
    }

    #[test]
    fn change_behind_agent_costs_nothing() {
        let mut w = build_grid(1, 8, 4, vec![]).unwrap();
        let (s, g) = (cell(8, 0, 0), cell(8, 0, 7));
        let mut p = MovingPlanner::new(&w, s, g, PlannerConfig::gdstar(Event::ShortestPath)).unwrap();
        for _ in 0..2 {
            p.plan().unwrap();
            p.step().unwrap();
        }
        let mut batch = ChangeBatch::new();
        batch.push(Edge::new(0, 1), 3.0);
        batch.push(Edge::new(1, 0), 3.0);
        w.apply_batch(&batch).unwrap();
        p.observe_changes(&batch).unwrap();
        let r = p.plan().unwrap();
        assert_eq!(r.stats.edge_evaluations, 0);
        assert_eq!(r.cost, dijkstra_opt_to_goal(&w, p.agent().current, g).cost);
    }

    #[test]
    fn stale_keys_are_reinserted_not_expanded() {
        let mut w = build_grid(5, 5, 8, vec![]).unwrap();
        let (s, g) = (cell(5, 0, 0), cell(5, 4, 4));
        let mut p = MovingPlanner::new(&w, s, g, PlannerConfig::dstar_lite()).unwrap();
        for _ in 0..2 {
            p.plan().unwrap();
            p.step().unwrap();
        }
        let mut batch = ChangeBatch::new();
        for e in [Edge::new(cell(5, 3, 3).0, g.0), Edge::new(g.0, cell(5, 3, 3).0)] {
            batch.push(e, INF);
        }
        w.apply_batch(&batch).unwrap();
        p.observe_changes(&batch).unwrap();
        let r = p.plan().unwrap();
        assert_eq!(r.cost, dijkstra_opt_to_goal(&w, p.agent().current, g).cost);
        assert_eq!(p.kernel().counters().stale_key_violations, 0);
        assert!(r.stats.max_pops_in_call <= 2);
    }

    #[test]
    fn blocked_goal_aborts() {
        let mut w = fixtures::diamond4_undirected();
        let batch: ChangeBatch =
            [(Edge::new(1, 3), INF), (Edge::new(3, 1), INF), (Edge::new(2, 3), INF), (Edge::new(3, 2), INF)]
                .into_iter()
                .collect();
        let script = ChangeScript::Batches { batches: vec![batch] };
        let mut p = MovingPlanner::new(&w, S, G, PlannerConfig::gdstar(Event::ShortestPath)).unwrap();
        let e = p.run_to_goal(&mut w, &script).unwrap();
        assert!(!e.reached_goal);
        assert_eq!(e.trajectory.vertices, vec![S, A]);
        let _ = B;
    }
}
