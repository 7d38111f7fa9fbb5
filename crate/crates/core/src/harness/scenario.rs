//! Scenario files: a world, a change script, queries and a planner roster.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::kernel::Event;
use crate::stationary::PlannerConfig;
use crate::worlds::geometry::Obstacle;
use crate::worlds::{build_grid, build_roadmap, Bounds, ChangeScript, Sampler, World};

pub const SCHEMA_VERSION: u32 = 1;

/// Default ε used by bounded planners when a roster entry leaves it out.
pub const DEFAULT_EPS: f64 = 1.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub id: String,
    pub seed: u64,
    pub world: WorldSpec,
    #[serde(default)]
    pub script: ChangeScript,
    /// Number of epochs for stationary planners (epoch 0 included). Moving
    /// planners run until the agent arrives; scripted changes stop after this many epochs.
    pub epochs: usize,
    pub queries: Vec<Query>,
    #[serde(default)]
    pub planners: Vec<PlannerSpec>,
    /// Busy-wait per edge evaluation, in microseconds.
    #[serde(default)]
    pub eval_delay_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WorldSpec {
    Grid {
        rows: usize,
        cols: usize,
        connectivity: u8,
        #[serde(default)]
        obstacles: Vec<Obstacle>,
    },
    Roadmap {
        n: usize,
        k: usize,
        sampler: Sampler,
        bounds: Bounds,
        #[serde(default = "yes")]
        symmetric: bool,
        #[serde(default)]
        obstacles: Vec<Obstacle>,
    },
    Embedded(Box<World>),
}

fn yes() -> bool {
    true
}

impl WorldSpec {
    pub fn build(&self) -> Result<World> {
        match self {
            WorldSpec::Grid { rows, cols, connectivity, obstacles } => {
                build_grid(*rows, *cols, *connectivity, obstacles.clone())
            }
            WorldSpec::Roadmap { n, k, sampler, bounds, symmetric, obstacles } => {
                build_roadmap(*n, *k, *sampler, bounds.clone(), *symmetric, obstacles.clone())
            }
            WorldSpec::Embedded(w) => {
                w.validate()?;
                Ok((**w).clone())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub start: VertexId,
    pub goal: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Lpa,
    Tlpa,
    Gls,
    Lgls,
    Blgls,
    Dstar,
    Tdstar,
    Gdstar,
    Bgdstar,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 9] = [
        PlannerKind::Lpa,
        PlannerKind::Tlpa,
        PlannerKind::Gls,
        PlannerKind::Lgls,
        PlannerKind::Blgls,
        PlannerKind::Dstar,
        PlannerKind::Tdstar,
        PlannerKind::Gdstar,
        PlannerKind::Bgdstar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Lpa => "lpa",
            PlannerKind::Tlpa => "tlpa",
            PlannerKind::Gls => "gls",
            PlannerKind::Lgls => "lgls",
            PlannerKind::Blgls => "blgls",
            PlannerKind::Dstar => "dstar",
            PlannerKind::Tdstar => "tdstar",
            PlannerKind::Gdstar => "gdstar",
            PlannerKind::Bgdstar => "bgdstar",
        }
    }

    pub fn is_moving(self) -> bool {
        matches!(self, PlannerKind::Dstar | PlannerKind::Tdstar | PlannerKind::Gdstar | PlannerKind::Bgdstar)
    }

    pub fn is_eager(self) -> bool {
        matches!(self, PlannerKind::Lpa | PlannerKind::Tlpa | PlannerKind::Dstar | PlannerKind::Tdstar)
    }

    /// Uses truncation (ε₂).
    pub fn is_bounded(self) -> bool {
        matches!(self, PlannerKind::Tlpa | PlannerKind::Blgls | PlannerKind::Tdstar | PlannerKind::Bgdstar)
    }

    /// Uses inflation (ε₁).
    pub fn is_inflated(self) -> bool {
        matches!(self, PlannerKind::Blgls | PlannerKind::Bgdstar)
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown planner {s:?} (expected one of lpa, tlpa, gls, lgls, blgls, dstar, tdstar, gdstar, bgdstar)")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// ε fixed for the whole run.
    #[default]
    Static,
    /// ε₁ = 1 + 5/q and ε₂ = 1 + 10/q with q the current vertex count.
    Densify,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    pub kind: PlannerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<Event>,
    #[serde(default)]
    pub schedule: Schedule,
}

impl PlannerSpec {
    pub fn new(kind: PlannerKind) -> Self {
        PlannerSpec { kind, eps1: None, eps2: None, event: None, schedule: Schedule::Static }
    }

    pub fn with_eps(kind: PlannerKind, eps1: f64, eps2: f64) -> Self {
        PlannerSpec { eps1: Some(eps1), eps2: Some(eps2), ..Self::new(kind) }
    }

    pub fn with_event(mut self, event: Event) -> Self {
        self.event = Some(event);
        self
    }

    pub fn eps1(&self) -> f64 {
        if self.kind.is_inflated() {
            self.eps1.unwrap_or(DEFAULT_EPS)
        } else {
            1.0
        }
    }

    pub fn eps2(&self) -> f64 {
        if self.kind.is_bounded() {
            self.eps2.unwrap_or(DEFAULT_EPS)
        } else {
            1.0
        }
    }

    pub fn event(&self) -> Event {
        self.event.unwrap_or_default()
    }

    pub fn config(&self) -> PlannerConfig {
        let ev = self.event();
        match self.kind {
            PlannerKind::Lpa | PlannerKind::Dstar => PlannerConfig::lpa(),
            PlannerKind::Tlpa | PlannerKind::Tdstar => PlannerConfig::tlpa(self.eps2()),
            PlannerKind::Gls => PlannerConfig::gls(ev),
            PlannerKind::Lgls | PlannerKind::Gdstar => PlannerConfig::lgls(ev),
            PlannerKind::Blgls | PlannerKind::Bgdstar => PlannerConfig::blgls(ev, self.eps1(), self.eps2()),
        }
    }

    /// CSV name. Bounded planners carry their ε (`blgls(1.2,1.2)`), non-default
    /// events a suffix (`lgls[cd2]`), densification schedules `(dyn)`.
    pub fn label(&self) -> String {
        let mut s = self.kind.name().to_string();
        if self.schedule == Schedule::Densify && (self.kind.is_bounded() || self.kind.is_inflated()) {
            s.push_str("(dyn)");
        } else if self.kind.is_bounded() {
            s.push_str(&format!("({},{})", self.eps1(), self.eps2()));
        }
        if !self.kind.is_eager() && self.event() != Event::ShortestPath {
            s.push_str(&format!("[{}]", self.event().label()));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.config().normalized()?;
        Ok(())
    }
}

/// What a CSV label says about the guarantee of its planner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LabelBound {
    Factor(f64, f64),
    /// ε changed per epoch; only `cost >= oracle` can be re-checked.
    Dynamic,
}

/// Recovers the ε pair from a label produced by [`PlannerSpec::label`].
pub fn parse_label(label: &str) -> Result<(PlannerKind, LabelBound)> {
    let bad = || Error::Schema { location: format!("planner {label:?}"), message: "unrecognised planner label".into() };
    let end = label.find(['(', '[']).unwrap_or(label.len());
    let kind: PlannerKind = label[..end].parse().map_err(|_| bad())?;
    let rest = &label[end..];
    if let Some(r) = rest.strip_prefix('(') {
        let inner = &r[..r.find(')').ok_or_else(bad)?];
        if inner == "dyn" {
            return Ok((kind, LabelBound::Dynamic));
        }
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let e1: f64 = a.parse().map_err(|_| bad())?;
        let e2: f64 = b.parse().map_err(|_| bad())?;
        return Ok((kind, LabelBound::Factor(e1, e2)));
    }
    Ok((kind, LabelBound::Factor(1.0, 1.0)))
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { location: location.into(), message: message.into() }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| {
            schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        Ok(sc)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Schema { location, message } => {
                Error::Schema { location: format!("{}: {location}", path.display()), message }
            }
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks everything that can be checked without running: schema version,
    /// vertex ids, planner parameters and the script. Returns the built world.
    pub fn validate(&self) -> Result<World> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.id.is_empty() {
            return Err(schema("id", "scenario id must not be empty"));
        }
        if self.id.contains([',', '"', '\n']) {
            return Err(schema("id", "scenario id must not contain commas, quotes or newlines"));
        }
        if self.epochs == 0 {
            return Err(schema("epochs", "at least one epoch required"));
        }
        let world = self.world.build().map_err(|e| schema("world", e.to_string()))?;
        let n = world.vertex_count();
        for (i, q) in self.queries.iter().enumerate() {
            for (field, v) in [("start", q.start), ("goal", q.goal)] {
                if v.0 >= n {
                    return Err(schema(format!("queries[{i}].{field}"), format!("vertex {} out of range (world has {n})", v.0)));
                }
            }
        }
        self.script.validate(&world).map_err(|e| schema("script", e.to_string()))?;
        let mut labels = std::collections::BTreeSet::new();
        for (i, p) in self.planners.iter().enumerate() {
            p.validate().map_err(|e| schema(format!("planners[{i}]"), e.to_string()))?;
            if p.kind.is_moving() && self.script.is_densify() {
                return Err(schema(format!("planners[{i}]"), "moving planners cannot run densification scripts"));
            }
            if p.schedule == Schedule::Densify && !self.script.is_densify() {
                return Err(schema(format!("planners[{i}].schedule"), "densify schedule needs a densify script"));
            }
            if !labels.insert(p.label()) {
                return Err(schema(format!("planners[{i}]"), format!("duplicate planner label {}", p.label())));
            }
        }
        Ok(world)
    }
}
