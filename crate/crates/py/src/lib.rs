//! Python bindings: worlds, the stationary and moving planners, the oracle and
//! the scenario runner.

// pyo3 0.22 macro expansion trips this lint on every `PyResult` method.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use replan_core::graph::{ChangeBatch, Edge};
use replan_core::harness::csv::rows_to_string;
use replan_core::harness::generate::{generate, GenParams};
use replan_core::harness::{run_scenario as run, PlannerKind, PlannerSpec, RunOptions, Scenario};
use replan_core::kernel::Path;
use replan_core::worlds::geometry::Obstacle;
use replan_core::worlds::{build_grid, build_roadmap, fixtures, Bounds, Sampler};
use replan_core::{oracle, Error, Event, MovingPlanner, StationaryPlanner, VertexId};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn ids(path: &Path) -> Vec<usize> {
    path.vertices.iter().map(|v| v.0).collect()
}

fn batch(changes: Vec<(usize, usize, f64)>) -> ChangeBatch {
    changes.into_iter().map(|(u, v, w)| (Edge { source: VertexId(u), target: VertexId(v) }, w)).collect()
}

fn spec(kind: &str, eps1: f64, eps2: f64, event: &str) -> PyResult<PlannerSpec> {
    let kind: PlannerKind = kind.parse().map_err(to_py)?;
    let event: Event = event.parse().map_err(to_py)?;
    let mut s = PlannerSpec::with_eps(kind, eps1, eps2);
    if !kind.is_eager() {
        s = s.with_event(event);
    }
    s.validate().map_err(to_py)?;
    Ok(s)
}

/// A graph with true weights, edge heuristics and optional geometry.
#[pyclass(module = "lazy_replan")]
#[derive(Clone)]
struct World {
    inner: replan_core::World,
}

#[pymethods]
impl World {
    /// Grid of `rows x cols` cells, 4- or 8-connected. Cell (r, c) has id r * cols + c.
    #[staticmethod]
    #[pyo3(signature = (rows, cols, connectivity=8))]
    fn grid(rows: usize, cols: usize, connectivity: u8) -> PyResult<Self> {
        Ok(World { inner: build_grid(rows, cols, connectivity, vec![]).map_err(to_py)? })
    }

    /// k-nearest-neighbour roadmap in the unit square. Halton samples unless a seed is given.
    #[staticmethod]
    #[pyo3(signature = (n, k, seed=None, symmetric=true))]
    fn roadmap(n: usize, k: usize, seed: Option<u64>, symmetric: bool) -> PyResult<Self> {
        let sampler = seed.map_or(Sampler::Halton, |seed| Sampler::Uniform { seed });
        Ok(World { inner: build_roadmap(n, k, sampler, Bounds::unit(2), symmetric, vec![]).map_err(to_py)? })
    }

    /// Four-vertex example: 0 -> 1 -> 3 costs 2, 0 -> 2 -> 3 costs 6.
    #[staticmethod]
    fn diamond() -> Self {
        World { inner: fixtures::diamond4() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: replan_core::World =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(to_py)?;
        Ok(World { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.graph.edge_count()
    }

    /// `(source, target)` pairs in edge-id order.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.graph.edges().iter().map(|e| (e.source.0, e.target.0)).collect()
    }

    fn weight(&self, source: usize, target: usize) -> PyResult<f64> {
        let id = self.inner.graph.require_edge(Edge { source: VertexId(source), target: VertexId(target) }).map_err(to_py)?;
        Ok(self.inner.truth[id.0])
    }

    /// Installs new true weights, given as `(source, target, weight)`.
    fn apply_changes(&mut self, changes: Vec<(usize, usize, f64)>) -> PyResult<()> {
        self.inner.apply_batch(&batch(changes)).map_err(to_py)
    }

    /// Replaces the dynamic obstacles by axis-aligned boxes `(xmin, ymin, xmax, ymax)`
    /// and returns the resulting weight changes.
    fn set_scene(&mut self, boxes: Vec<(f64, f64, f64, f64)>) -> PyResult<Vec<(usize, usize, f64)>> {
        if self.inner.coords.is_none() {
            return Err(PyValueError::new_err("scenes need a world with coordinates"));
        }
        let scene: Vec<Obstacle> = boxes.iter().map(|&(x0, y0, x1, y1)| Obstacle::rect(&[x0, y0], &[x1, y1])).collect();
        let b = self.inner.set_scene(&scene);
        Ok(b.iter().map(|c| (c.edge.source.0, c.edge.target.0, c.weight)).collect())
    }

    /// Optimal cost and path under the true weights (`inf`, `None` when unreachable).
    fn shortest_path(&self, start: usize, goal: usize) -> PyResult<(f64, Option<Vec<usize>>)> {
        let n = self.inner.vertex_count();
        if start >= n || goal >= n {
            return Err(PyValueError::new_err(format!("vertex out of range (world has {n})")));
        }
        let r = oracle::dijkstra_opt(&self.inner, VertexId(start), VertexId(goal));
        Ok((r.cost, r.path.as_ref().map(ids)))
    }

    fn __repr__(&self) -> String {
        format!("World(vertices={}, edges={})", self.inner.vertex_count(), self.inner.graph.edge_count())
    }
}

/// Result of one query or plan.
#[pyclass(module = "lazy_replan", get_all)]
struct Solution {
    path: Vec<usize>,
    cost: f64,
    edge_evaluations: u64,
    vertex_expansions: u64,
}

#[pymethods]
impl Solution {
    fn __repr__(&self) -> String {
        format!(
            "Solution(cost={}, path={:?}, edge_evaluations={}, vertex_expansions={})",
            self.cost, self.path, self.edge_evaluations, self.vertex_expansions
        )
    }
}

fn check_query(world: &World, start: usize, goal: usize) -> PyResult<()> {
    let n = world.inner.vertex_count();
    if start >= n || goal >= n {
        return Err(PyValueError::new_err(format!("vertex out of range (world has {n})")));
    }
    Ok(())
}

/// Fixed start and goal, repeated queries while the weights change.
/// `kind` is one of lgls, blgls, gls, lpa, tlpa.
#[pyclass(module = "lazy_replan")]
struct Planner {
    inner: StationaryPlanner,
}

#[pymethods]
impl Planner {
    #[new]
    #[pyo3(signature = (world, start, goal, kind="lgls", eps1=1.2, eps2=1.2, event="sp"))]
    fn new(world: &World, start: usize, goal: usize, kind: &str, eps1: f64, eps2: f64, event: &str) -> PyResult<Self> {
        let s = spec(kind, eps1, eps2, event)?;
        if s.kind.is_moving() {
            return Err(PyValueError::new_err(format!("{kind} is a moving planner; use Agent")));
        }
        check_query(world, start, goal)?;
        let inner = StationaryPlanner::new(&world.inner, VertexId(start), VertexId(goal), s.config()).map_err(to_py)?;
        Ok(Planner { inner })
    }

    fn solve(&mut self) -> PyResult<Solution> {
        let r = self.inner.solve_query().map_err(to_py)?;
        Ok(Solution {
            path: ids(&r.path),
            cost: r.cost,
            edge_evaluations: r.stats.edge_evaluations,
            vertex_expansions: r.stats.vertex_expansions,
        })
    }

    fn apply_changes(&mut self, changes: Vec<(usize, usize, f64)>) -> PyResult<()> {
        self.inner.apply_changes(&batch(changes)).map_err(to_py)
    }

    #[getter]
    fn eval_count(&self) -> u64 {
        self.inner.eval_count()
    }

    #[getter]
    fn expansion_count(&self) -> u64 {
        self.inner.expansion_count()
    }
}

/// An agent walking to its goal and replanning from where it stands.
/// `kind` is one of gdstar, bgdstar, dstar, tdstar.
#[pyclass(module = "lazy_replan")]
struct Agent {
    inner: MovingPlanner,
}

#[pymethods]
impl Agent {
    #[new]
    #[pyo3(signature = (world, start, goal, kind="gdstar", eps1=1.2, eps2=1.2, event="sp"))]
    fn new(world: &World, start: usize, goal: usize, kind: &str, eps1: f64, eps2: f64, event: &str) -> PyResult<Self> {
        let s = spec(kind, eps1, eps2, event)?;
        if !s.kind.is_moving() {
            return Err(PyValueError::new_err(format!("{kind} is a stationary planner; use Planner")));
        }
        check_query(world, start, goal)?;
        let inner = MovingPlanner::new(&world.inner, VertexId(start), VertexId(goal), s.config()).map_err(to_py)?;
        Ok(Agent { inner })
    }

    fn plan(&mut self) -> PyResult<Solution> {
        let r = self.inner.plan().map_err(to_py)?;
        Ok(Solution {
            path: ids(&r.path),
            cost: r.cost,
            edge_evaluations: r.stats.edge_evaluations,
            vertex_expansions: r.stats.vertex_expansions,
        })
    }

    /// Moves one edge along the last plan and returns the new position.
    fn step(&mut self) -> PyResult<usize> {
        Ok(self.inner.step().map_err(to_py)?.0)
    }

    fn observe_changes(&mut self, changes: Vec<(usize, usize, f64)>) -> PyResult<()> {
        self.inner.observe_changes(&batch(changes)).map_err(to_py)
    }

    #[getter]
    fn position(&self) -> usize {
        self.inner.agent().current.0
    }

    #[getter]
    fn at_goal(&self) -> bool {
        self.inner.at_goal()
    }

    #[getter]
    fn trajectory(&self) -> Vec<usize> {
        self.inner.agent().trajectory.iter().map(|v| v.0).collect()
    }

    #[getter]
    fn traversed_cost(&self) -> f64 {
        self.inner.agent().traversed_cost
    }
}

/// First `n` points of the Halton sequence in `dim` dimensions.
#[pyfunction]
fn halton(n: usize, dim: usize) -> PyResult<Vec<Vec<f64>>> {
    if dim == 0 || dim > replan_core::worlds::halton::max_dim() {
        return Err(PyValueError::new_err(format!("dim must be in 1..={}", replan_core::worlds::halton::max_dim())));
    }
    Ok(replan_core::worlds::halton::halton(n, dim))
}

/// Seeded scenario file (JSON) for family dynamic/densify/moving on a grid or roadmap.
#[pyfunction]
#[pyo3(signature = (family="dynamic", world="grid", seed=0))]
fn generate_scenario(family: &str, world: &str, seed: u64) -> PyResult<String> {
    let p = GenParams::new(family.parse().map_err(to_py)?, world.parse().map_err(to_py)?, seed);
    generate(&p).and_then(|sc| sc.to_json()).map_err(to_py)
}

/// Replays a scenario (JSON text) and returns the result CSV.
#[pyfunction]
fn run_scenario(py: Python<'_>, scenario: &str) -> PyResult<String> {
    let sc = Scenario::from_json(scenario).map_err(to_py)?;
    let out = py.allow_threads(|| run(&sc, RunOptions::default())).map_err(to_py)?;
    if let Some(msg) = out.diagnostics.violation() {
        return Err(PyRuntimeError::new_err(msg));
    }
    rows_to_string(&out.rows).map_err(to_py)
}

#[pymodule]
fn lazy_replan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<World>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Planner>()?;
    m.add_class::<Agent>()?;
    m.add_function(wrap_pyfunction!(halton, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
