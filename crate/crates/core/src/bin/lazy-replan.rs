use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use replan_core::harness::csv::{read_rows, verify, write_rows};
use replan_core::harness::generate::{generate, Family, GenParams, WorldKind};
use replan_core::harness::{run_with_planners, PlannerKind, PlannerSpec, RunOptions, Scenario};
use replan_core::{Error, Event, Result};

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "LAZY_REPLAN_THREADS";

#[derive(Parser)]
#[command(name = "lazy-replan", version, about = "Replay replanning scenarios and emit per-epoch CSV")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded scenario file.
    Generate(GenerateArgs),
    /// Replay a scenario with its own planner roster.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Replay a scenario with the given planners instead of its roster.
    Compare {
        /// Comma separated: lpa, tlpa, gls, lgls, blgls, dstar, tdstar, gdstar, bgdstar.
        #[arg(long, value_delimiter = ',')]
        planners: Vec<String>,
        #[arg(long)]
        scenario: PathBuf,
        /// Inflation for blgls/bgdstar.
        #[arg(long, default_value_t = 1.2)]
        eps1: f64,
        /// Truncation for blgls/bgdstar/tlpa/tdstar.
        #[arg(long, default_value_t = 1.2)]
        eps2: f64,
        /// Lazy planners' event: sp or cd<depth>.
        #[arg(long, default_value = "sp")]
        event: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Re-read a CSV and re-certify every row.
    Verify {
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args)]
struct OutArgs {
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time per row (rows are no longer byte-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// dynamic, densify or moving.
    #[arg(long, default_value = "dynamic")]
    family: String,
    /// grid or roadmap.
    #[arg(long, default_value = "grid")]
    world: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Grid connectivity, 4 or 8.
    #[arg(long)]
    connectivity: Option<u8>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    queries: Option<usize>,
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    obstacles: Option<usize>,
    /// Scenario destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let family: Family = a.family.parse()?;
    let world: WorldKind = a.world.parse()?;
    let mut p = GenParams::new(family, world, a.seed);
    p.rows = a.rows.unwrap_or(p.rows);
    p.cols = a.cols.unwrap_or(p.cols);
    p.connectivity = a.connectivity.unwrap_or(p.connectivity);
    p.n = a.n.unwrap_or(p.n);
    p.k = a.k.unwrap_or(p.k);
    p.epochs = a.epochs.unwrap_or(p.epochs);
    p.queries = a.queries.unwrap_or(p.queries);
    p.fraction = a.fraction.unwrap_or(p.fraction);
    p.batch_size = a.batch_size.unwrap_or(p.batch_size);
    p.obstacles = a.obstacles.unwrap_or(p.obstacles);
    let sc = generate(&p)?;
    let mut w = output(a.out.as_deref())?;
    writeln!(w, "{}", sc.to_json()?)?;
    w.flush()?;
    Ok(())
}

fn replay(sc: &Scenario, planners: &[PlannerSpec], out: OutArgs) -> Result<()> {
    let run = run_with_planners(sc, planners, RunOptions { timing: out.timing })?;
    let mut w = output(out.out.as_deref())?;
    write_rows(&mut w, &run.rows)?;
    w.flush()?;
    match run.diagnostics.violation() {
        Some(msg) => Err(Error::Invariant(format!("{msg}\n{:#?}", run.diagnostics))),
        None => Ok(()),
    }
}

fn compare_roster(names: &[String], eps1: f64, eps2: f64, event: &str) -> Result<Vec<PlannerSpec>> {
    let event: Event = event.parse()?;
    names
        .iter()
        .filter(|s| !s.is_empty())
        .map(|name| {
            let kind: PlannerKind = name.trim().parse()?;
            let mut spec = PlannerSpec::with_eps(kind, eps1, eps2);
            if !kind.is_eager() {
                spec = spec.with_event(event);
            }
            Ok(spec)
        })
        .collect()
}

fn cmd_verify(path: &Path) -> Result<()> {
    let rows = read_rows(File::open(path)?)?;
    let rep = verify(&rows)?;
    if rep.ok() {
        println!("{} rows certified", rep.rows);
        Ok(())
    } else {
        Err(Error::Invariant(rep.failures.join("\n")))
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .map_err(|_| Error::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))
}

fn real_main(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Run { scenario, out } => {
            let sc = Scenario::load(&scenario)?;
            replay(&sc, &sc.planners, out)
        }
        Cmd::Compare { planners, scenario, eps1, eps2, event, out } => {
            let roster = compare_roster(&planners, eps1, eps2, &event)?;
            let sc = Scenario::load(&scenario)?;
            replay(&sc, &roster, out)
        }
        Cmd::Verify { csv } => cmd_verify(&csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lazy-replan: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
