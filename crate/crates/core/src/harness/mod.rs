//! Scenario files, the replay runner, CSV output and scenario generators.

pub mod csv;
pub mod generate;
pub mod runner;
pub mod scenario;

pub use runner::{run_scenario, run_with_planners, Diagnostics, RunOptions, ScenarioRun};
pub use scenario::{PlannerKind, PlannerSpec, Query, Scenario, Schedule, WorldSpec};
