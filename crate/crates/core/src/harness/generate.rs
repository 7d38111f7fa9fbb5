//! Seeded scenario generators for the three experiment families.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::{PlannerKind, PlannerSpec, Query, Scenario, Schedule, WorldSpec, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::worlds::geometry::{distance, Obstacle};
use crate::worlds::{Bounds, ChangeScript, Sampler, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Fixed topology, edge weights change between epochs.
    Dynamic,
    /// Fixed weights, vertices are added every epoch.
    Densify,
    /// An agent walks to its goal while the world changes.
    Moving,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(Family::Dynamic),
            "densify" => Ok(Family::Densify),
            "moving" => Ok(Family::Moving),
            _ => Err(Error::Usage(format!("unknown family {s:?} (expected dynamic, densify or moving)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Dynamic => "dynamic",
            Family::Densify => "densify",
            Family::Moving => "moving",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorldKind {
    Grid,
    Roadmap,
}

impl FromStr for WorldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(WorldKind::Grid),
            "roadmap" => Ok(WorldKind::Roadmap),
            _ => Err(Error::Usage(format!("unknown world kind {s:?} (expected grid or roadmap)"))),
        }
    }
}

impl fmt::Display for WorldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorldKind::Grid => "grid",
            WorldKind::Roadmap => "roadmap",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub family: Family,
    pub world: WorldKind,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    /// Grid connectivity, 4 or 8. Unit-weight 4-connected grids keep every
    /// path cost exact in floating point.
    pub connectivity: u8,
    pub n: usize,
    pub k: usize,
    pub epochs: usize,
    pub queries: usize,
    /// Share of edge pairs toggled per epoch on roadmaps.
    pub fraction: f64,
    /// Samples added per densification epoch.
    pub batch_size: usize,
    /// Rectangles per scene on grids.
    pub obstacles: usize,
}

impl GenParams {
    pub fn new(family: Family, world: WorldKind, seed: u64) -> Self {
        GenParams {
            family,
            world,
            seed,
            rows: 16,
            cols: 16,
            connectivity: 8,
            n: 500,
            k: 10,
            epochs: if family == Family::Densify { 20 } else { 6 },
            queries: 1,
            fraction: 0.05,
            batch_size: 100,
            obstacles: 6,
        }
    }

    pub fn id(&self) -> String {
        let size = match self.world {
            WorldKind::Grid if self.connectivity == 8 => format!("{}x{}", self.rows, self.cols),
            WorldKind::Grid => format!("{}x{}c{}", self.rows, self.cols, self.connectivity),
            WorldKind::Roadmap => format!("n{}k{}", self.n, self.k),
        };
        format!("{}-{}-{size}-s{}", self.family, self.world, self.seed)
    }
}

pub fn default_roster(family: Family) -> Vec<PlannerSpec> {
    use PlannerKind::*;
    match family {
        Family::Dynamic => vec![
            PlannerSpec::new(Lgls),
            PlannerSpec::new(Gls),
            PlannerSpec::new(Lpa),
            PlannerSpec::with_eps(Blgls, 1.2, 1.2),
            PlannerSpec::with_eps(Tlpa, 1.0, 1.2),
        ],
        Family::Densify => vec![
            PlannerSpec::new(Lgls),
            PlannerSpec { schedule: Schedule::Densify, ..PlannerSpec::new(Blgls) },
        ],
        Family::Moving => vec![
            PlannerSpec::new(Gdstar),
            PlannerSpec::new(Dstar),
            PlannerSpec::with_eps(Bgdstar, 1.2, 1.2),
            PlannerSpec::with_eps(Tdstar, 1.0, 1.2),
        ],
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn blocked(world: &World, v: VertexId, extra: &[Obstacle]) -> bool {
    let p = world.point(v).expect("generated worlds carry coordinates");
    world.obstacles.iter().chain(extra).any(|o| o.contains(p))
}

/// Random start/goal pairs at least `min_dist` apart, avoiding blocked vertices.
fn pick_queries(world: &World, count: usize, min_dist: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Query>> {
    let n = world.vertex_count();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut found = None;
        for _ in 0..10_000 {
            let s = VertexId(rng.gen_range(0..n));
            let g = VertexId(rng.gen_range(0..n));
            if s == g || blocked(world, s, &[]) || blocked(world, g, &[]) {
                continue;
            }
            if distance(world.point(s).unwrap(), world.point(g).unwrap()) >= min_dist {
                found = Some(Query { start: s, goal: g });
                break;
            }
        }
        out.push(found.ok_or_else(|| invalid("could not place a start/goal pair".into()))?);
    }
    Ok(out)
}

/// Axis-aligned blocks covering whole cells, kept clear of the query endpoints.
fn grid_scene(world: &World, rows: usize, cols: usize, count: usize, keep: &[VertexId], rng: &mut ChaCha8Rng) -> Vec<Obstacle> {
    let mut scene = Vec::with_capacity(count);
    let max_side = (rows.min(cols) / 4).max(1);
    let mut tries = 0;
    while scene.len() < count && tries < 1000 {
        tries += 1;
        let h = rng.gen_range(1..=max_side);
        let w = rng.gen_range(1..=max_side);
        let r0 = rng.gen_range(0..rows.saturating_sub(h).max(1));
        let c0 = rng.gen_range(0..cols.saturating_sub(w).max(1));
        let o = Obstacle::rect(
            &[c0 as f64 - 0.5, r0 as f64 - 0.5],
            &[(c0 + w) as f64 - 0.5, (r0 + h) as f64 - 0.5],
        );
        if keep.iter().any(|&v| blocked(world, v, std::slice::from_ref(&o))) {
            continue;
        }
        scene.push(o);
    }
    scene
}

fn disc_obstacles(count: usize, rng: &mut ChaCha8Rng) -> Vec<Obstacle> {
    (0..count)
        .map(|_| {
            let c = [rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)];
            Obstacle::circle(&c, rng.gen_range(0.04..0.1))
        })
        .collect()
}

/// Builds a self-contained scenario; the result always passes [`Scenario::validate`].
pub fn generate(p: &GenParams) -> Result<Scenario> {
    if p.epochs == 0 {
        return Err(invalid("epochs must be at least 1".into()));
    }
    if p.queries == 0 {
        return Err(invalid("at least one query required".into()));
    }
    if p.family == Family::Moving && p.queries != 1 {
        return Err(invalid("moving scenarios have exactly one query".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (world_spec, script, queries) = match (p.world, p.family) {
        (WorldKind::Grid, Family::Densify) => {
            return Err(invalid("densification needs a roadmap world".into()));
        }
        (WorldKind::Grid, _) => {
            let spec = WorldSpec::Grid { rows: p.rows, cols: p.cols, connectivity: p.connectivity, obstacles: vec![] };
            let world = spec.build()?;
            let queries = pick_queries(&world, p.queries, 0.5 * p.rows.max(p.cols) as f64, &mut rng)?;
            let keep: Vec<VertexId> = queries.iter().flat_map(|q| [q.start, q.goal]).collect();
            let scenes =
                (0..3).map(|_| grid_scene(&world, p.rows, p.cols, p.obstacles, &keep, &mut rng)).collect();
            (spec, ChangeScript::Scenes { scenes }, queries)
        }
        (WorldKind::Roadmap, family) => {
            let densify = family == Family::Densify;
            let sampler = if densify { Sampler::Uniform { seed: p.seed } } else { Sampler::Halton };
            let obstacles = disc_obstacles(3, &mut rng);
            let spec = WorldSpec::Roadmap {
                n: p.n,
                k: p.k,
                sampler,
                bounds: Bounds::unit(2),
                symmetric: true,
                obstacles,
            };
            let world = spec.build()?;
            let queries = pick_queries(&world, p.queries, 0.6, &mut rng)?;
            let script = if densify {
                ChangeScript::Densify { batch_size: p.batch_size, seed: rng.gen() }
            } else {
                ChangeScript::RandomFraction { fraction: p.fraction, seed: rng.gen() }
            };
            (spec, script, queries)
        }
    };
    let sc = Scenario {
        schema_version: SCHEMA_VERSION,
        id: p.id(),
        seed: p.seed,
        world: world_spec,
        script,
        epochs: p.epochs,
        queries,
        planners: default_roster(p.family),
        eval_delay_us: 0,
    };
    sc.validate()?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_scene_cycle_round_trips() {
        let sc = generate(&GenParams::new(Family::Dynamic, WorldKind::Grid, 1)).unwrap();
        let ChangeScript::Scenes { scenes } = &sc.script else { panic!() };
        assert_eq!(scenes.len(), 3);
        assert_eq!(sc.epochs, 6);
        let back = Scenario::from_json(&sc.to_json().unwrap()).unwrap();
        assert_eq!(back, sc);
        back.validate().unwrap();
    }

    #[test]
    fn roadmap_scale() {
        let sc = generate(&GenParams::new(Family::Dynamic, WorldKind::Roadmap, 2)).unwrap();
        let w = sc.validate().unwrap();
        assert_eq!(w.vertex_count(), 500);
        assert_eq!(w.k, 10);
    }

    #[test]
    fn densify_family() {
        let sc = generate(&GenParams::new(Family::Densify, WorldKind::Roadmap, 3)).unwrap();
        assert!(sc.script.is_densify());
        assert_eq!(sc.epochs, 20);
        assert!(sc.planners.iter().any(|p| p.label() == "blgls(dyn)"));
        assert!(generate(&GenParams::new(Family::Densify, WorldKind::Grid, 3)).is_err());
    }

    #[test]
    fn same_seed_same_file() {
        let p = GenParams { queries: 3, ..GenParams::new(Family::Dynamic, WorldKind::Grid, 9) };
        assert_eq!(generate(&p).unwrap().to_json().unwrap(), generate(&p).unwrap().to_json().unwrap());
    }

    #[test]
    fn moving_has_one_query() {
        let p = GenParams { queries: 2, ..GenParams::new(Family::Moving, WorldKind::Grid, 1) };
        assert!(generate(&p).is_err());
        let sc = generate(&GenParams::new(Family::Moving, WorldKind::Grid, 1)).unwrap();
        assert!(sc.planners.iter().all(|s| s.kind.is_moving()));
    }
}
