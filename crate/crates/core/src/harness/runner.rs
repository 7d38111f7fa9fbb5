//! Replays a scenario for every planner of its roster.

use std::time::Duration;

use rayon::prelude::*;

use super::scenario::{PlannerSpec, Query, Scenario, Schedule};
use crate::error::{Error, Result};
use crate::moving::MovingPlanner;
use crate::oracle::{certify, dijkstra_opt, dijkstra_opt_to_goal};
use crate::stationary::StationaryPlanner;
use crate::stats::{QueryStats, RunStats};
use crate::worlds::{eps1_schedule, eps2_schedule, EpochChange, World};

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Record wall time (off by default so output is reproducible byte for byte).
    pub timing: bool,
}

/// Invariant counters gathered while replaying (all must stay zero, except
/// `max_pops_in_call` which must stay at most 2).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub max_pops_in_call: u32,
    pub weight_violations: u64,
    pub stale_key_violations: u64,
    pub queue_violations: u64,
    pub depth_overshoots: u64,
    pub bound_failures: u64,
}

impl Diagnostics {
    fn merge(&mut self, o: &Diagnostics) {
        self.max_pops_in_call = self.max_pops_in_call.max(o.max_pops_in_call);
        self.weight_violations += o.weight_violations;
        self.stale_key_violations += o.stale_key_violations;
        self.queue_violations += o.queue_violations;
        self.depth_overshoots += o.depth_overshoots;
        self.bound_failures += o.bound_failures;
    }

    /// Description of the first violated invariant, if any.
    pub fn violation(&self) -> Option<String> {
        if self.max_pops_in_call > 2 {
            return Some(format!("a vertex was processed {} times in one repair call", self.max_pops_in_call));
        }
        if self.weight_violations > 0 {
            return Some(format!("{} lazy-weight invariant violations", self.weight_violations));
        }
        if self.stale_key_violations > 0 {
            return Some(format!("{} expansions with stale keys", self.stale_key_violations));
        }
        if self.queue_violations > 0 {
            return Some(format!("{} queue membership violations", self.queue_violations));
        }
        if self.bound_failures > 0 {
            return Some(format!("{} rows failed bound certification", self.bound_failures));
        }
        None
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioRun {
    pub rows: Vec<RunStats>,
    pub diagnostics: Diagnostics,
}

/// Queue membership is checked by full scan on graphs up to this size.
const QUEUE_SCAN_LIMIT: usize = 200;

fn row_id(sc: &Scenario, q: usize) -> String {
    if sc.queries.len() > 1 {
        format!("{}/q{q}", sc.id)
    } else {
        sc.id.clone()
    }
}

struct Recorder<'a> {
    sc: &'a Scenario,
    spec: &'a PlannerSpec,
    label: String,
    opts: RunOptions,
    rows: Vec<RunStats>,
    diag: Diagnostics,
    last_evals: u64,
    last_expansions: u64,
}

impl Recorder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        q: usize,
        epoch: usize,
        evals: u64,
        expansions: u64,
        stats: &QueryStats,
        cost: f64,
        oracle: f64,
        eps: (f64, f64),
    ) {
        let cert = certify(cost, oracle, eps.0, eps.1);
        if !cert.ok() {
            self.diag.bound_failures += 1;
        }
        self.diag.max_pops_in_call = self.diag.max_pops_in_call.max(stats.max_pops_in_call);
        self.rows.push(RunStats {
            scenario_id: row_id(self.sc, q),
            epoch,
            planner: self.label.clone(),
            edge_evals: evals - self.last_evals,
            vertex_expansions: expansions - self.last_expansions,
            wall_time_us: if self.opts.timing { stats.wall_time_us } else { 0 },
            path_cost: cost,
            oracle_cost: oracle,
            bound_ok: cert.ok(),
        });
        self.last_evals = evals;
        self.last_expansions = expansions;
    }

    fn kernel_checks(&mut self, k: &crate::kernel::SearchKernel) {
        if k.graph().vertex_count() <= QUEUE_SCAN_LIMIT {
            self.diag.queue_violations += k.queue_invariant_violations() as u64;
        }
        self.diag.weight_violations += k.weights().audit() as u64;
    }

    fn finish_kernel(&mut self, k: &crate::kernel::SearchKernel) {
        self.diag.weight_violations += k.weights().violations();
        self.diag.stale_key_violations += k.counters().stale_key_violations;
        self.diag.depth_overshoots += k.counters().depth_overshoots;
    }

    fn stationary(&mut self, base: &World, qi: usize, query: Query) -> Result<()> {
        let sc = self.sc;
        let mut world = base.clone();
        let mut p = StationaryPlanner::new(&world, query.start, query.goal, self.spec.config())?;
        p.set_eval_delay(Duration::from_micros(sc.eval_delay_us));
        self.last_evals = 0;
        self.last_expansions = 0;
        for epoch in 0..sc.epochs {
            if epoch > 0 {
                match world.advance(&sc.script, epoch)? {
                    EpochChange::Batch(b) => p.apply_changes(&b)?,
                    EpochChange::Densify(d) => p.apply_densify(&d)?,
                }
            }
            if self.spec.schedule == Schedule::Densify {
                let q = world.vertex_count();
                p.set_epsilons(eps1_schedule(q), eps2_schedule(q))?;
            }
            let r = p.solve_query()?;
            let oracle = dijkstra_opt(&world, query.start, query.goal).cost;
            let eps = (p.config().eps1, p.config().eps2);
            self.row(qi, epoch, p.eval_count(), p.expansion_count(), &r.stats, r.cost, oracle, eps);
            self.kernel_checks(p.kernel());
        }
        self.finish_kernel(p.kernel());
        Ok(())
    }

    fn moving(&mut self, base: &World, qi: usize, query: Query) -> Result<()> {
        let sc = self.sc;
        let mut world = base.clone();
        let mut p = MovingPlanner::new(&world, query.start, query.goal, self.spec.config())?;
        p.set_eval_delay(Duration::from_micros(sc.eval_delay_us));
        self.last_evals = 0;
        self.last_expansions = 0;
        let limit = 4 * world.vertex_count() + sc.epochs + 1000;
        let mut epoch = 0;
        while !p.at_goal() {
            let r = p.plan()?;
            let from = p.agent().current;
            let oracle = dijkstra_opt_to_goal(&world, from, query.goal).cost;
            let eps = (p.config().eps1, p.config().eps2);
            self.row(qi, epoch, p.eval_count(), p.expansion_count(), &r.stats, r.cost, oracle, eps);
            self.kernel_checks(p.kernel());
            if r.cost.is_infinite() {
                break;
            }
            p.step()?;
            epoch += 1;
            if epoch > limit {
                return Err(Error::Invariant(format!("agent did not reach the goal within {limit} steps")));
            }
            if epoch < sc.epochs {
                if let EpochChange::Batch(b) = world.advance(&sc.script, epoch)? {
                    p.observe_changes(&b)?;
                }
            }
        }
        self.finish_kernel(p.kernel());
        Ok(())
    }
}

fn run_planner(sc: &Scenario, world: &World, spec: &PlannerSpec, opts: RunOptions) -> Result<ScenarioRun> {
    let mut rec = Recorder {
        sc,
        spec,
        label: spec.label(),
        opts,
        rows: Vec::new(),
        diag: Diagnostics::default(),
        last_evals: 0,
        last_expansions: 0,
    };
    for (qi, &q) in sc.queries.iter().enumerate() {
        if spec.kind.is_moving() {
            rec.moving(world, qi, q)?;
        } else {
            rec.stationary(world, qi, q)?;
        }
    }
    Ok(ScenarioRun { rows: rec.rows, diagnostics: rec.diag })
}

/// Runs the given roster (planners in parallel, each strictly sequential) and
/// returns rows sorted by planner label, then epoch, then scenario id.
pub fn run_with_planners(sc: &Scenario, planners: &[PlannerSpec], opts: RunOptions) -> Result<ScenarioRun> {
    let mut checked = sc.clone();
    checked.planners = planners.to_vec();
    let mut world = checked.validate()?;
    world.start_script(&sc.script);
    let runs: Vec<ScenarioRun> =
        planners.par_iter().map(|spec| run_planner(sc, &world, spec, opts)).collect::<Result<_>>()?;
    let mut out = ScenarioRun::default();
    for r in &runs {
        out.diagnostics.merge(&r.diagnostics);
    }
    out.rows = runs.into_iter().flat_map(|r| r.rows).collect();
    out.rows.sort_by(|a, b| {
        a.planner.cmp(&b.planner).then(a.epoch.cmp(&b.epoch)).then(a.scenario_id.cmp(&b.scenario_id))
    });
    Ok(out)
}

/// Runs the scenario's own roster.
pub fn run_scenario(sc: &Scenario, opts: RunOptions) -> Result<ScenarioRun> {
    run_with_planners(sc, &sc.planners, opts)
}
