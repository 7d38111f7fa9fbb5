//! Lazy incremental replanning on graphs with expensive edge evaluations.
//!
//! Planners keep a search tree alive across graph changes and evaluate true
//! edge weights only when a candidate path needs them:
//!
//! * [`stationary::StationaryPlanner`] answers repeated queries between a fixed
//!   start and goal (L-GLS, B-LGLS and the eager LPA*/TLPA* baselines).
//! * [`moving::MovingPlanner`] replans for an agent walking to a fixed goal
//!   (GD*, B-GD* and the eager D*-Lite/TD* baselines).
//!
//! [`worlds`] builds grids and roadmaps with scripted changes, [`oracle`]
//! computes ground truth, and [`harness`] replays scenario files into CSV.

pub mod error;
pub mod graph;
pub mod harness;
pub mod heuristic;
pub mod kernel;
pub mod moving;
pub mod oracle;
pub mod stationary;
pub mod stats;
pub mod weights;
pub mod worlds;

pub use error::{Error, Result};
pub use graph::{ChangeBatch, Cost, Edge, EdgeId, Graph, VertexId, INF};
pub use kernel::{Event, Path};
pub use moving::MovingPlanner;
pub use stationary::{EvaluationPolicy, PlannerConfig, StationaryPlanner};
pub use worlds::World;
