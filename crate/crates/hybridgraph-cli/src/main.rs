//! Command-line front end: ingestion, connectivity, motif detection,
//! ranking, and benchmarks over typed account graphs.
//!
//! Every subcommand writes its data to the file named by `--out` and echoes
//! a fully resolved `<out>.manifest` sidecar, so a run can be reproduced
//! exactly from its artifacts. Progress goes to stderr, one line per stage;
//! stdout stays silent.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hybridgraph::bench::{self, SweepOptions, SyntheticSpec};
use hybridgraph::engine::{local, parallel, Engine, PageRankOptions, PageRankScores};
use hybridgraph::etl::{self, EdgeSnapshot, ReadOptions, SnapshotManifest};
use hybridgraph::graph::PropertyGraph;
use hybridgraph::pipelines::{self, EngineSelection, PipelineOptions, Strategy};
use hybridgraph::router::{self, GraphStats, QueryKind, RouterConfig};
use hybridgraph::{Error, Result};

const WORKERS_ENV: &str = "HYBRIDGRAPH_WORKERS";

#[derive(Parser)]
#[command(
    name = "hybridgraph",
    version,
    about = "Dual-engine account-graph analytics: ingest snapshots, find connected users and shared identifiers, rank vertices, benchmark both engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Read, validate, and merge snapshot files; write the canonical edge list
    Ingest(IngestArgs),
    /// Group users connected through shared identifiers across snapshots
    Components(ComponentsArgs),
    /// List user pairs that share at least one identifier
    DetectAccounts(DetectArgs),
    /// PageRank scores over the merged graph
    Pagerank(PagerankArgs),
    /// Measure engines, degree-cap loss, and router calibration
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Show which engine the router picks for hypothetical graph stats
    ExplainRoute(ExplainArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Snapshot manifest: one `path<TAB>identifier_type` line per file
    #[arg(long)]
    manifest: PathBuf,
    /// Abort a snapshot file when more than this fraction of its data lines
    /// fail to parse
    #[arg(long, default_value_t = 0.01)]
    max_reject_fraction: f64,
}

#[derive(Args)]
struct EngineArgs {
    /// Engine to run: local, parallel, or auto (router decides)
    #[arg(long, default_value = "auto", value_parser = EngineSelection::from_str)]
    engine: EngineSelection,
    /// Worker threads for the parallel engine; defaults to HYBRIDGRAPH_WORKERS,
    /// then the machine's available parallelism
    #[arg(long)]
    workers: Option<usize>,
    /// Partition count for the parallel engine
    #[arg(long, default_value_t = 32)]
    partitions: usize,
    /// Router thresholds file; built-in defaults when omitted
    #[arg(long)]
    router_config: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Merged edge list destination
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ComponentsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// unified (one merged graph) or legacy (per-snapshot passes, then a
    /// combining pass); both produce the same grouping
    #[arg(long, default_value = "unified", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Write only the number of components in the merged graph
    #[arg(long)]
    count_only: bool,
    #[command(flatten)]
    engine: EngineArgs,
    /// Labeling CSV destination (or the single count line with --count-only)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Drop every edge of identifiers linked to more than this many accounts
    #[arg(long)]
    cap: Option<u32>,
    /// Match only through these identifier types (comma separated); default
    /// is every type the manifest declares
    #[arg(long, value_delimiter = ',')]
    via: Option<Vec<String>>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Pairs CSV destination
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PagerankArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// Iteration budget; the run may stop earlier on convergence
    #[arg(long, default_value_t = 100)]
    iters: u32,
    /// Stop once the per-iteration L1 change drops below this
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    engine: EngineArgs,
    /// Scores CSV destination
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Time both engines across synthetic scales and locate their crossover
    Sweep(SweepArgs),
    /// Edge loss under a series of identifier degree caps
    LossCurve(LossArgs),
    /// Derive router thresholds from a sweep report
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// User counts to sweep, comma separated
    #[arg(long, required = true, value_delimiter = ',')]
    scales: Vec<u64>,
    /// Queries to measure at each scale
    #[arg(
        long,
        default_value = "components_full,components_count",
        value_delimiter = ',',
        value_parser = QueryKind::from_str
    )]
    queries: Vec<QueryKind>,
    /// Engines to race
    #[arg(
        long,
        default_value = "local,parallel",
        value_delimiter = ',',
        value_parser = Engine::from_str
    )]
    engines: Vec<Engine>,
    /// Timed runs per cell (median is reported); a warm-up run is extra
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Identifier popularity skew; 0 is uniform, larger concentrates edges
    /// on hot identifiers
    #[arg(long, default_value_t = 1.0)]
    skew: f64,
    #[arg(long, default_value_t = 0.5)]
    identifiers_per_user: f64,
    #[arg(long, default_value_t = 1.4)]
    edges_per_user: f64,
    #[arg(long, default_value_t = 32)]
    partitions: usize,
    /// Worker threads for the parallel engine; defaults to
    /// HYBRIDGRAPH_WORKERS, then 4
    #[arg(long)]
    workers: Option<usize>,
    /// Report CSV destination; per-run timings land next to it
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LossArgs {
    #[arg(long, default_value_t = 20_000)]
    users: u64,
    #[arg(long, default_value_t = 10_000)]
    identifiers: u64,
    #[arg(long, default_value_t = 60_000)]
    edges: u64,
    /// Identifier popularity skew; 1.0 produces the heavy hitters capping
    /// is meant for
    #[arg(long, default_value_t = 1.0)]
    skew: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Degree caps to evaluate, ascending
    #[arg(long, default_value = "10,100,1000,10000", value_delimiter = ',')]
    caps: Vec<u32>,
    /// Loss CSV destination
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Sweep report CSV produced by `bench sweep`
    #[arg(long)]
    report: PathBuf,
    /// Router config destination
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExplainArgs {
    #[arg(long)]
    vertices: u64,
    #[arg(long)]
    edges: u64,
    /// components_full, components_count, motif_full, or pagerank
    #[arg(long, value_parser = QueryKind::from_str)]
    query: QueryKind,
    /// Estimated result rows
    #[arg(long)]
    rows: u64,
    /// Router thresholds file; built-in defaults when omitted
    #[arg(long)]
    router_config: Option<PathBuf>,
    /// Explanation text destination
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    0
                }
                _ => {
                    eprint!("{err}");
                    1
                }
            };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidInput(_) => 1,
                Error::Io { .. } => 2,
                Error::Correctness(_) => 3,
            }
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Ingest(args) => cmd_ingest(args),
        Cmd::Components(args) => cmd_components(args),
        Cmd::DetectAccounts(args) => cmd_detect_accounts(args),
        Cmd::Pagerank(args) => cmd_pagerank(args),
        Cmd::Bench(BenchCmd::Sweep(args)) => cmd_sweep(args),
        Cmd::Bench(BenchCmd::LossCurve(args)) => cmd_loss_curve(args),
        Cmd::Bench(BenchCmd::Calibrate(args)) => cmd_calibrate(args),
        Cmd::ExplainRoute(args) => cmd_explain_route(args),
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let snapshots = load_snapshots(&args.input)?;
    let started = Instant::now();
    let (graph, merge) = etl::merge_snapshots(&snapshots)?;
    stage(
        "merge",
        started,
        format_args!(
            "{} input edges from {} snapshots into {} vertices / {} edges",
            merge.total_input_edges(),
            snapshots.len(),
            graph.vertex_count(),
            graph.edge_count()
        ),
    );

    let started = Instant::now();
    write_edge_list(&graph, &args.out)?;
    stage("write", started, args.out.display());

    let mut rm = RunManifest::new("ingest");
    rm.input(&args.input);
    rm.out(&args.out);
    rm.seed(None);
    rm.write(&args.out)
}

fn cmd_components(args: ComponentsArgs) -> Result<()> {
    let snapshots = load_snapshots(&args.input)?;
    let (selection, opts, workers) = engine_setup(&args.engine, None)?;

    if args.count_only {
        let started = Instant::now();
        let (graph, _) = etl::merge_snapshots(&snapshots)?;
        stage(
            "merge",
            started,
            format_args!(
                "{} vertices / {} edges",
                graph.vertex_count(),
                graph.edge_count()
            ),
        );

        let engine = resolve_engine(
            selection,
            GraphStats {
                vertex_count: graph.vertex_count() as u64,
                edge_count: graph.edge_count() as u64,
                query_kind: QueryKind::ComponentsCount,
                estimated_output_rows: 1,
            },
            opts.router_config,
        )?;

        let started = Instant::now();
        let count = match engine {
            Engine::Local => local::count_components(&graph),
            Engine::Parallel => {
                let pg = parallel::partition(&graph, opts.partitions)?;
                let rt = parallel::Runtime::new(workers)?;
                parallel::connected_components(&pg, &rt).component_count()
            }
        };
        stage(
            "count",
            started,
            format_args!("{count} components via {engine}"),
        );
        write_text(&args.out, &format!("{count}\n"))?;
    } else {
        let started = Instant::now();
        let result = match args.strategy {
            Strategy::Unified => {
                pipelines::combined_connected_users_unified(&snapshots, selection, &opts)?
            }
            Strategy::Legacy => {
                pipelines::combined_connected_users_legacy(&snapshots, selection, &opts)?
            }
        };
        stage(
            "components",
            started,
            format_args!(
                "{} users in {} components via {} engine, {} strategy",
                result.payload.len(),
                result.payload.component_count(),
                result.engine,
                result.strategy
            ),
        );

        let started = Instant::now();
        etl::persist_labeling(&result.payload, &args.out)?;
        write_text(
            &sidecar_path(&args.out, "provenance"),
            &result.provenance_lines(),
        )?;
        stage("write", started, args.out.display());
    }

    let mut rm = RunManifest::new("components");
    rm.input(&args.input);
    rm.push("strategy", args.strategy.as_str());
    rm.push("count_only", args.count_only);
    rm.engine(&args.engine, workers, &opts.router_config);
    rm.out(&args.out);
    rm.seed(None);
    rm.write(&args.out)
}

fn cmd_detect_accounts(args: DetectArgs) -> Result<()> {
    let snapshots = load_snapshots(&args.input)?;
    let (selection, mut opts, workers) = engine_setup(&args.engine, None)?;
    opts.via_types = args
        .via
        .as_ref()
        .map(|list| list.iter().cloned().collect::<BTreeSet<String>>());

    let started = Instant::now();
    let result = pipelines::multi_account_detection(&snapshots, args.cap, selection, &opts)?;
    stage(
        "detect",
        started,
        format_args!(
            "{} same-user pairs across {} users via {} engine",
            result.payload.len(),
            result.payload.grouping().len(),
            result.engine
        ),
    );

    let started = Instant::now();
    etl::persist_pairs(result.payload.pairs(), &args.out)?;
    write_text(
        &sidecar_path(&args.out, "provenance"),
        &result.provenance_lines(),
    )?;
    stage("write", started, args.out.display());

    let mut rm = RunManifest::new("detect-accounts");
    rm.input(&args.input);
    rm.push("cap", display_or(args.cap, "none"));
    rm.push(
        "via",
        args.via
            .as_ref()
            .map(|v| v.join(","))
            .unwrap_or_else(|| "all".into()),
    );
    rm.engine(&args.engine, workers, &opts.router_config);
    rm.out(&args.out);
    rm.seed(None);
    rm.write(&args.out)
}

fn cmd_pagerank(args: PagerankArgs) -> Result<()> {
    let snapshots = load_snapshots(&args.input)?;
    let (selection, opts, workers) = engine_setup(&args.engine, None)?;
    let pr = PageRankOptions {
        damping: args.damping,
        max_iters: args.iters,
        tol: args.tol,
    };

    let started = Instant::now();
    let (graph, _) = etl::merge_snapshots(&snapshots)?;
    stage(
        "merge",
        started,
        format_args!(
            "{} vertices / {} edges",
            graph.vertex_count(),
            graph.edge_count()
        ),
    );

    let engine = resolve_engine(
        selection,
        GraphStats {
            vertex_count: graph.vertex_count() as u64,
            edge_count: graph.edge_count() as u64,
            query_kind: QueryKind::Pagerank,
            estimated_output_rows: graph.vertex_count() as u64,
        },
        opts.router_config,
    )?;

    let started = Instant::now();
    let scores = match engine {
        Engine::Local => local::pagerank(&graph, pr)?,
        Engine::Parallel => {
            let pg = parallel::partition(&graph, opts.partitions)?;
            let rt = parallel::Runtime::new(workers)?;
            parallel::pagerank(&pg, &rt, pr)?
        }
    };
    stage(
        "pagerank",
        started,
        format_args!("{} vertices scored via {engine}", scores.len()),
    );

    let started = Instant::now();
    write_scores(&scores, &args.out)?;
    stage("write", started, args.out.display());

    let mut rm = RunManifest::new("pagerank");
    rm.input(&args.input);
    rm.push("damping", args.damping);
    rm.push("iters", args.iters);
    rm.push("tol", args.tol);
    rm.engine(&args.engine, workers, &opts.router_config);
    rm.out(&args.out);
    rm.seed(None);
    rm.write(&args.out)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let workers = resolve_workers(args.workers, 4)?;
    let specs = args
        .scales
        .iter()
        .map(|&users| synthetic_spec(users, &args))
        .collect::<Result<Vec<_>>>()?;
    let opts = SweepOptions {
        timed_runs: args.runs,
        partitions: args.partitions,
        workers,
        pagerank: PageRankOptions::default(),
    };

    let cells = specs.len() * args.queries.len() * args.engines.len();
    eprintln!(
        "[sweep] measuring {cells} cells ({} scales x {} queries x {} engines, {} timed runs each)",
        specs.len(),
        args.queries.len(),
        args.engines.len(),
        args.runs
    );

    let started = Instant::now();
    let report = bench::run_sweep(&specs, &args.queries, &args.engines, &opts)?;
    stage(
        "sweep",
        started,
        format_args!(
            "{} rows, crossover {}",
            report.rows.len(),
            display_or(report.crossover_scale, "none")
        ),
    );

    let started = Instant::now();
    write_text(&args.out, &bench::report_csv(&report))?;
    let runs_out = runs_path(&args.out);
    write_text(&runs_out, &bench::runs_csv(&report))?;
    stage(
        "write",
        started,
        format_args!("{} and {}", args.out.display(), runs_out.display()),
    );

    let mut rm = RunManifest::new("bench sweep");
    rm.push("scales", join(&args.scales));
    rm.push(
        "queries",
        args.queries
            .iter()
            .map(|q| q.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    rm.push(
        "engines",
        args.engines
            .iter()
            .map(|e| e.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    rm.push("runs", args.runs);
    rm.push("skew", args.skew);
    rm.push("identifiers_per_user", args.identifiers_per_user);
    rm.push("edges_per_user", args.edges_per_user);
    rm.push("partitions", args.partitions);
    rm.push("workers", workers);
    rm.out(&args.out);
    rm.push_path("runs_out", &runs_out);
    rm.seed(Some(args.seed));
    rm.write(&args.out)
}

fn cmd_loss_curve(args: LossArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n_users: args.users,
        n_identifiers: args.identifiers,
        n_edges: args.edges,
        degree_skew: args.skew,
        seed: args.seed,
    };

    let started = Instant::now();
    let curve = bench::loss_curve(&spec, &args.caps)?;
    stage(
        "loss",
        started,
        format_args!(
            "{} caps against {} edges",
            curve.rows.len(),
            curve.edges_before
        ),
    );

    write_text(&args.out, &bench::loss_csv(&curve))?;

    let mut rm = RunManifest::new("bench loss-curve");
    rm.push("users", args.users);
    rm.push("identifiers", args.identifiers);
    rm.push("edges", args.edges);
    rm.push("skew", args.skew);
    rm.push("caps", join(&args.caps));
    rm.out(&args.out);
    rm.seed(Some(args.seed));
    rm.write(&args.out)
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.report).map_err(|e| Error::io(&*args.report, e))?;
    let report = bench::parse_report_csv(&text)?;

    let started = Instant::now();
    let config = bench::calibrate_router(&report)?;
    stage(
        "calibrate",
        started,
        format_args!(
            "thresholds from {} measured rows: {}",
            report.rows.len(),
            config.to_config_text().trim().replace('\n', ", ")
        ),
    );

    config.to_file(&args.out)?;

    let mut rm = RunManifest::new("bench calibrate");
    rm.push_path("report", &args.report);
    rm.out(&args.out);
    rm.seed(None);
    rm.write(&args.out)
}

fn cmd_explain_route(args: ExplainArgs) -> Result<()> {
    let config = load_router_config(args.router_config.as_deref())?;
    let stats = GraphStats {
        vertex_count: args.vertices,
        edge_count: args.edges,
        query_kind: args.query,
        estimated_output_rows: args.rows,
    };
    let choice = router::choose_engine(stats, config)?;
    stage(
        "route",
        Instant::now(),
        format_args!("{} for {} at these stats", choice.engine, args.query),
    );
    write_text(&args.out, &router::explain(&choice))?;

    let mut rm = RunManifest::new("explain-route");
    rm.push("vertices", args.vertices);
    rm.push("edges", args.edges);
    rm.push("query", args.query.as_str());
    rm.push("rows", args.rows);
    rm.router(args.router_config.as_deref(), &config);
    rm.out(&args.out);
    rm.seed(None);
    rm.write(&args.out)
}

/// Reads every snapshot the manifest lists, logging one stage line per file
/// plus every rejected line.
fn load_snapshots(input: &InputArgs) -> Result<Vec<EdgeSnapshot>> {
    let started = Instant::now();
    let manifest = SnapshotManifest::from_file(&input.manifest, PathBuf::new())?;
    let options = ReadOptions {
        max_reject_fraction: input.max_reject_fraction,
        ..ReadOptions::default()
    };
    let loaded = manifest.load(&options)?;
    for (snapshot, report) in &loaded {
        stage(
            "read",
            started,
            format_args!(
                "{}: {} edges kept, {} of {} data lines rejected",
                report.path.display(),
                snapshot.len(),
                report.rejects.len(),
                report.data_lines()
            ),
        );
        for reject in &report.rejects {
            eprintln!("[read]   {reject}");
        }
    }
    Ok(loaded.into_iter().map(|(snapshot, _)| snapshot).collect())
}

/// Turns engine flags into a pipeline configuration plus the resolved worker
/// count. `workers_default` overrides the machine-sized default where a
/// command wants one (the sweep defaults to 4).
fn engine_setup(
    args: &EngineArgs,
    workers_default: Option<usize>,
) -> Result<(EngineSelection, PipelineOptions, usize)> {
    let fallback = workers_default.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(usize::from)
            .unwrap_or(1)
    });
    let workers = resolve_workers(args.workers, fallback)?;
    let router_config = load_router_config(args.router_config.as_deref())?;
    let opts = PipelineOptions {
        partitions: args.partitions,
        workers: Some(workers),
        router_config,
        via_types: None,
    };
    Ok((args.engine, opts, workers))
}

fn resolve_workers(flag: Option<usize>, default: usize) -> Result<usize> {
    let workers = match flag {
        Some(w) => w,
        None => match std::env::var(WORKERS_ENV) {
            Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
                Error::invalid(format!(
                    "{WORKERS_ENV} must be a positive integer, got {raw:?}"
                ))
            })?,
            Err(_) => default,
        },
    };
    if workers == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    Ok(workers)
}

fn load_router_config(path: Option<&Path>) -> Result<RouterConfig> {
    match path {
        Some(p) => RouterConfig::from_file(p),
        None => Ok(RouterConfig::default()),
    }
}

fn resolve_engine(
    selection: EngineSelection,
    stats: GraphStats,
    config: RouterConfig,
) -> Result<Engine> {
    match selection {
        EngineSelection::Fixed(engine) => Ok(engine),
        EngineSelection::Auto => {
            let choice = router::choose_engine(stats, config)?;
            stage(
                "route",
                Instant::now(),
                format_args!("{}: {}", choice.engine, choice.reasons.join("; ")),
            );
            Ok(choice.engine)
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy> {
    match s {
        "unified" => Ok(Strategy::Unified),
        "legacy" => Ok(Strategy::Legacy),
        other => Err(Error::invalid(format!(
            "unknown strategy {other:?}; expected unified or legacy"
        ))),
    }
}

fn synthetic_spec(users: u64, args: &SweepArgs) -> Result<SyntheticSpec> {
    let scaled = |per_user: f64| -> u64 { ((users as f64 * per_user).round() as u64).max(1) };
    let spec = SyntheticSpec {
        n_users: users,
        n_identifiers: scaled(args.identifiers_per_user),
        n_edges: scaled(args.edges_per_user),
        degree_skew: args.skew,
        seed: args.seed,
    };
    spec.validate()?;
    Ok(spec)
}

/// The record of one invocation with every flag resolved, written next to
/// the output file so the run can be reissued exactly.
struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    fn new(subcommand: &str) -> Self {
        RunManifest {
            entries: vec![("subcommand".into(), subcommand.into())],
        }
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    fn push_path(&mut self, key: &str, path: &Path) {
        self.push(key, path.display());
    }

    fn input(&mut self, input: &InputArgs) {
        self.push_path("manifest", &input.manifest);
        self.push("max_reject_fraction", input.max_reject_fraction);
    }

    fn engine(&mut self, args: &EngineArgs, workers: usize, config: &RouterConfig) {
        self.push("engine", args.engine);
        self.push("workers", workers);
        self.push("partitions", args.partitions);
        self.router(args.router_config.as_deref(), config);
    }

    fn router(&mut self, path: Option<&Path>, config: &RouterConfig) {
        self.push(
            "router_config",
            path.map(|p| p.display().to_string())
                .unwrap_or_else(|| "default".into()),
        );
        for line in config.to_config_text().lines() {
            if let Some((key, value)) = line.split_once('=') {
                self.push(&format!("router.{key}"), value);
            }
        }
    }

    fn out(&mut self, path: &Path) {
        self.push_path("out", path);
    }

    fn seed(&mut self, seed: Option<u64>) {
        self.push("seed", display_or(seed, "none"));
    }

    fn write(&self, out: &Path) -> Result<()> {
        let mut text = String::new();
        for (key, value) in &self.entries {
            let _ = writeln!(text, "{key}={value}");
        }
        write_text(&sidecar_path(out, "manifest"), &text)
    }
}

fn stage(name: &str, started: Instant, msg: impl std::fmt::Display) {
    eprintln!("[{name}] {msg} ({:.1?})", started.elapsed());
}

fn sidecar_path(out: &Path, extension: &str) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".");
    name.push(extension);
    PathBuf::from(name)
}

/// `report.csv` gets its per-run timings as `report.runs.csv`.
fn runs_path(out: &Path) -> PathBuf {
    match out.extension() {
        Some(ext) => out.with_extension(format!("runs.{}", ext.to_string_lossy())),
        None => sidecar_path(out, "runs"),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_edge_list(graph: &PropertyGraph, path: &Path) -> Result<()> {
    let mut text = String::new();
    for edge in graph.edges() {
        let _ = writeln!(text, "{}\t{}\t{}", edge.src(), edge.dst(), edge.label());
    }
    write_text(path, &text)
}

fn write_scores(scores: &PageRankScores, path: &Path) -> Result<()> {
    let mut text = String::from("vertex_id,score\n");
    for (vertex, score) in scores.iter() {
        let _ = writeln!(text, "{vertex},{score}");
    }
    write_text(path, &text)
}

fn display_or<T: std::fmt::Display>(value: Option<T>, fallback: &str) -> String {
    match value {
        Some(v) => v.to_string(),
        None => fallback.to_string(),
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
