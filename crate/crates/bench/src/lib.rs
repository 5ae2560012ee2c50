//! Command-line harness: load or generate a graph, run BFS/CC/SSSP under a
//! chosen engine and tuning, and emit per-iteration profiles.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wedge_core::io::{self, GenSpec};
use wedge_core::push_ref::{
    run_until_convergence_push, run_until_convergence_push_parallel, MinMessage,
};
use wedge_core::{
    bfs_program, cc_program, run_until_convergence, sssp_program, value_digest, ApplicationProgram,
    EdgeList, EngineConfig, FrontierPrecision, FullnessThreshold, Graph, IterationStats, Mode,
    RunResult, RunStatus,
};

pub const CSV_HEADER: &str =
    "iteration,mode,transform_ms,pull_ms,active_edge_pct,vectors_touched,frontier_out";

pub const SWEEP_CSV_HEADER: &str =
    "value,iterations,wedge_iterations,full_iterations,vectors_touched,edges_processed,wall_ms,converged,digest";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wedge",
    version,
    about = "Pull-only graph engine benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one application to convergence and print per-iteration stats.
    Run(RunArgs),
    /// Repeat a run over a list of threshold or precision values.
    Sweep(SweepArgs),
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AppKind {
    Bfs,
    Cc,
    Sssp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    /// Pull engine, transforming sparse frontiers.
    Wedge,
    /// Pull engine over the whole graph every iteration.
    Full,
    /// Push-based reference engine.
    Push,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Threshold,
    Precision,
}

#[derive(Debug, Clone, Args)]
struct GraphArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator spec: path:N, grid:R:C, rmat:SCALE:EF[:A:B:C:D].
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Collapse duplicate edges after loading.
    #[arg(long)]
    dedup: bool,
    /// Upper bound for synthesized SSSP weights on unweighted inputs.
    #[arg(long, default_value_t = 255)]
    max_weight: u32,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    app: AppKind,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    root: Option<u32>,
    #[arg(long, value_enum, default_value_t = EngineKind::Wedge)]
    engine: EngineKind,
    /// Fullness threshold in [0, 1]; defaults to 0.01 for BFS, 0.20 otherwise.
    #[arg(long)]
    threshold: Option<f64>,
    /// Edge vectors per frontier bit; defaults to 8 for BFS, 4 otherwise.
    #[arg(long)]
    precision: Option<usize>,
    #[arg(long, default_value_t = wedge_core::graph::DEFAULT_VECTOR_WIDTH)]
    vector_width: usize,
    #[arg(long, env = "WEDGE_WORKERS")]
    workers: Option<usize>,
    #[arg(long, default_value_t = wedge_core::frontier::DEFAULT_SLICE_SIZE)]
    slice_size: usize,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Use the atomic-min parallel push engine with --engine push.
    #[arg(long)]
    parallel_push: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    sweep: SweepKind,
    /// Comma-separated values to sweep.
    #[arg(long, default_value = "")]
    values: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Clone, Args)]
struct GenerateArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Attach hashed weights in 1..=MAX.
    #[arg(long, value_name = "MAX")]
    weights: Option<u32>,
}

/// One CSV/JSON row of the per-iteration profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRow {
    pub iteration: usize,
    pub mode: &'static str,
    pub transform_ms: f64,
    pub pull_ms: f64,
    pub active_edge_pct: f64,
    /// Edge vectors pulled; edges traversed for the push engine.
    pub vectors_touched: u64,
    pub frontier_out: usize,
}

impl From<&IterationStats> for IterationRow {
    fn from(s: &IterationStats) -> Self {
        Self {
            iteration: s.iteration,
            mode: s.mode.as_str(),
            transform_ms: s.transform_time.map_or(0.0, |t| t.as_secs_f64() * 1e3),
            pull_ms: s.pull_time.as_secs_f64() * 1e3,
            active_edge_pct: s.active_edge_fraction * 100.0,
            vectors_touched: if s.mode == Mode::Push {
                s.edges_processed
            } else {
                s.vectors_touched
            },
            frontier_out: s.frontier_out_size,
        }
    }
}

impl IterationRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:.3},{:.3},{:.4},{},{}",
            self.iteration,
            self.mode,
            self.transform_ms,
            self.pull_ms,
            self.active_edge_pct,
            self.vectors_touched,
            self.frontier_out
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub app: AppKind,
    pub engine: EngineKind,
    pub source: String,
    pub vertices: usize,
    pub edges: usize,
    pub vector_width: usize,
    pub vector_count: usize,
    pub threshold: f64,
    pub precision: usize,
    pub workers: usize,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub wall_ms: f64,
    pub iterations: usize,
    pub wedge_iterations: usize,
    pub full_iterations: usize,
    pub vectors_touched: u64,
    pub edges_processed: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub iterations: Vec<IterationRow>,
    pub totals: Totals,
    /// Checksum of the final vertex values, as `0x`-prefixed hex.
    pub digest: String,
}

impl RunReport {
    fn exit_code(&self) -> i32 {
        if self.totals.converged {
            EXIT_OK
        } else {
            EXIT_MAX_ITERS
        }
    }
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args, out, err),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Generate(args) => cmd_generate(args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn load_edges(args: &GraphArgs) -> anyhow::Result<(EdgeList, String)> {
    match (&args.graph, &args.gen) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let edges = io::parse_edge_list(&text)
                .with_context(|| format!("cannot parse {}", path.display()))?;
            Ok((edges, path.display().to_string()))
        }
        (None, Some(spec)) => {
            let edges = io::generate(&GenSpec::parse(spec, args.seed)?)?;
            Ok((edges, format!("{spec} seed={}", args.seed)))
        }
        _ => bail!("exactly one of --graph or --gen is required"),
    }
}

struct Prepared {
    graph: Graph,
    config: EngineConfig,
    echo: ConfigEcho,
}

fn prepare(args: &RunArgs) -> anyhow::Result<Prepared> {
    let (mut edges, source) = load_edges(&args.graph)?;
    if args.app == AppKind::Cc {
        edges = io::symmetrize(&edges, args.graph.dedup);
    } else if args.graph.dedup {
        edges = io::dedup(&edges);
    }
    if args.app == AppKind::Sssp && !edges.is_weighted() {
        edges = io::synthesize_weights(&edges, args.graph.max_weight)?;
    }
    if args.app != AppKind::Cc && args.root.is_none() {
        bail!("--root is required for {:?}", args.app);
    }
    let graph = Graph::build(&edges, args.vector_width)?;

    let mut config = match args.app {
        AppKind::Bfs => EngineConfig::bfs(),
        AppKind::Cc | AppKind::Sssp => EngineConfig::default(),
    };
    if let Some(t) = args.threshold {
        config.threshold = FullnessThreshold::new(t)?;
    }
    if let Some(p) = args.precision {
        config.precision = FrontierPrecision::new(p)?;
    }
    if args.engine == EngineKind::Full {
        config.threshold = FullnessThreshold::new(0.0)?;
    }
    config.workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    config.slice_size = args.slice_size;
    config.max_iterations = args.max_iters;
    config.validate()?;

    let echo = ConfigEcho {
        app: args.app,
        engine: args.engine,
        source,
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        vector_width: args.vector_width,
        vector_count: graph.pull.vector_count(),
        threshold: config.threshold.fraction(),
        precision: config.precision.vectors_per_group(),
        workers: config.workers,
        max_iters: config.max_iterations,
    };
    Ok(Prepared {
        graph,
        config,
        echo,
    })
}

fn execute_program<P: MinMessage>(
    program: &P,
    prepared: &Prepared,
    engine: EngineKind,
    parallel_push: bool,
) -> anyhow::Result<RunResult<P::Value>> {
    let g = &prepared.graph;
    let cfg = &prepared.config;
    let result = match engine {
        EngineKind::Wedge | EngineKind::Full => {
            run_until_convergence(&g.pull, &g.index, program, &g.degrees, cfg)?
        }
        EngineKind::Push if parallel_push => run_until_convergence_push_parallel(
            &g.push,
            program,
            &g.degrees,
            cfg.max_iterations,
            cfg.workers,
        )?,
        EngineKind::Push => {
            run_until_convergence_push(&g.push, program, &g.degrees, cfg.max_iterations)?
        }
    };
    Ok(result)
}

fn report_from<V: Copy + Into<u64>>(
    echo: ConfigEcho,
    result: RunResult<V>,
    wall_ms: f64,
) -> RunReport {
    let count = |m: Mode| result.stats.iter().filter(|s| s.mode == m).count();
    let totals = Totals {
        wall_ms,
        iterations: result.stats.len(),
        wedge_iterations: count(Mode::Wedge),
        full_iterations: count(Mode::FullScan),
        vectors_touched: result.stats.iter().map(|s| s.vectors_touched).sum(),
        edges_processed: result.stats.iter().map(|s| s.edges_processed).sum(),
        converged: result.status == RunStatus::Converged,
    };
    RunReport {
        iterations: result.stats.iter().map(IterationRow::from).collect(),
        digest: format!("{:#018x}", value_digest(&result.values)),
        config: echo,
        totals,
    }
}

/// Loads, runs, and summarizes one configuration.
fn execute(args: &RunArgs) -> anyhow::Result<RunReport> {
    let prepared = prepare(args)?;
    let n = prepared.graph.vertex_count();
    let root = args.root.unwrap_or(0);
    let start = Instant::now();
    fn go<P: MinMessage + ApplicationProgram>(
        p: &P,
        prepared: &Prepared,
        args: &RunArgs,
        start: Instant,
    ) -> anyhow::Result<RunReport> {
        let result = execute_program(p, prepared, args.engine, args.parallel_push)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(report_from(prepared.echo.clone(), result, wall_ms))
    }
    match args.app {
        AppKind::Bfs => go(&bfs_program(root, n)?, &prepared, args, start),
        AppKind::Cc => go(&cc_program(), &prepared, args, start),
        AppKind::Sssp => go(&sssp_program(root, n)?, &prepared, args, start),
    }
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let report = execute(args)?;
    match args.format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in &report.iterations {
                writeln!(out, "{}", row.to_csv())?;
            }
            let t = &report.totals;
            writeln!(
                err,
                "# app={:?} engine={:?} vertices={} edges={} iterations={} wedge={} full={} vectors_touched={} wall_ms={:.3} converged={} digest={}",
                report.config.app,
                report.config.engine,
                report.config.vertices,
                report.config.edges,
                t.iterations,
                t.wedge_iterations,
                t.full_iterations,
                t.vectors_touched,
                t.wall_ms,
                t.converged,
                report.digest
            )?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    if !report.totals.converged {
        writeln!(
            err,
            "warning: stopped after {} iterations without converging",
            report.totals.iterations
        )?;
    }
    Ok(report.exit_code())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub iterations: usize,
    pub wedge_iterations: usize,
    pub full_iterations: usize,
    pub vectors_touched: u64,
    pub edges_processed: u64,
    pub wall_ms: f64,
    pub converged: bool,
    pub digest: String,
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let values: Vec<f64> = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| anyhow!("bad sweep value {s:?}"))
        })
        .collect::<anyhow::Result<_>>()?;
    if values.is_empty() {
        bail!("--values must list at least one value");
    }

    let mut rows = Vec::with_capacity(values.len());
    for &value in &values {
        let mut run = args.run.clone();
        match args.sweep {
            SweepKind::Threshold => run.threshold = Some(value),
            SweepKind::Precision => {
                if value.fract() != 0.0 || value < 1.0 {
                    bail!("precision values must be positive integers, got {value}");
                }
                run.precision = Some(value as usize);
            }
        }
        let report = execute(&run)?;
        let t = report.totals;
        rows.push(SweepRow {
            value,
            iterations: t.iterations,
            wedge_iterations: t.wedge_iterations,
            full_iterations: t.full_iterations,
            vectors_touched: t.vectors_touched,
            edges_processed: t.edges_processed,
            wall_ms: t.wall_ms,
            converged: t.converged,
            digest: report.digest,
        });
    }

    match args.run.format {
        Format::Csv => {
            writeln!(out, "{SWEEP_CSV_HEADER}")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{:.3},{},{}",
                    r.value,
                    r.iterations,
                    r.wedge_iterations,
                    r.full_iterations,
                    r.vectors_touched,
                    r.edges_processed,
                    r.wall_ms,
                    r.converged,
                    r.digest
                )?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }

    if let Some(first) = rows.first() {
        if let Some(bad) = rows.iter().find(|r| r.digest != first.digest) {
            bail!(
                "result digest changed across sweep: {} at {} vs {} at {}",
                first.digest,
                first.value,
                bad.digest,
                bad.value
            );
        }
    }
    Ok(if rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_MAX_ITERS
    })
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let mut edges = io::generate(&GenSpec::parse(&args.gen, args.seed)?)?;
    if let Some(max) = args.weights {
        edges = io::synthesize_weights(&edges, max)?;
    }
    let text = io::serialize_edge_list(&edges);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}
