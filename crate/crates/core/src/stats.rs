use serde::{Deserialize, Serialize};

use crate::graph::{serde_cost, Cost, INF};

/// Work done by one `solve_query`/`plan` call.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub edge_evaluations: u64,
    pub vertex_expansions: u64,
    /// Repair/evaluate rounds of the outer loop.
    pub rounds: u64,
    /// Most pops of a single vertex within one repair call.
    pub max_pops_in_call: u32,
    pub wall_time_us: u64,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub scenario_id: String,
    pub epoch: usize,
    pub planner: String,
    pub edge_evals: u64,
    pub vertex_expansions: u64,
    pub wall_time_us: u64,
    #[serde(with = "serde_cost")]
    pub path_cost: Cost,
    #[serde(with = "serde_cost")]
    pub oracle_cost: Cost,
    pub bound_ok: bool,
}

impl Default for RunStats {
    fn default() -> Self {
        RunStats {
            scenario_id: String::new(),
            epoch: 0,
            planner: String::new(),
            edge_evals: 0,
            vertex_expansions: 0,
            wall_time_us: 0,
            path_cost: INF,
            oracle_cost: INF,
            bound_ok: true,
        }
    }
}
