//! Engine benchmarking: scale sweeps that locate the engine crossover,
//! degree-cap loss curves, and router calibration from measured winners.
//!
//! The harness chases orderings, not absolute times: which engine wins at
//! which scale, and where the ranking flips. Every cell is cross-checked
//! for output equality between engines before any timing is recorded; a
//! timing for a wrong answer is meaningless. Graph construction and
//! partitioning count as load, not query: each engine is measured on its
//! query path against data it has already ingested, which is how both run
//! in production.

mod synth;

pub use synth::{generate, SyntheticSpec};

use std::time::Instant;

use crate::engine::{local, parallel, Engine, PageRankOptions};
use crate::error::{Error, Result};
use crate::etl::{merge_snapshots, USER_VTYPE};
use crate::graph::{degree_cap, PropertyGraph};
use crate::router::{choose_engine, GraphStats, QueryKind, RouterConfig};

/// One measured cell: a query at a scale on an engine.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub query_kind: QueryKind,
    /// Vertex count of the generated graph (not the requested user count).
    pub scale: u64,
    pub engine: Engine,
    pub median_ms: f64,
    /// Individual timed runs, in execution order; the median is over these.
    pub runs_ms: Vec<f64>,
    pub output_rows: u64,
}

/// A full sweep: rows sorted by `(query_kind, scale, engine)`, plus the
/// detected components_full crossover if the winner flipped exactly once.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchRow>,
    /// A scale strictly between the largest local-winning and smallest
    /// parallel-winning measured scales for components_full.
    pub crossover_scale: Option<u64>,
    pub host: String,
}

/// Timing protocol knobs.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Timed runs per cell; the warm-up run is always extra and untimed.
    pub timed_runs: usize,
    pub partitions: usize,
    /// Worker threads for the parallel engine.
    pub workers: usize,
    pub pagerank: PageRankOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            timed_runs: 3,
            partitions: 32,
            workers: 4,
            pagerank: PageRankOptions::default(),
        }
    }
}

impl SweepOptions {
    fn validate(&self) -> Result<()> {
        if self.timed_runs < 3 {
            return Err(Error::invalid(format!(
                "{} timed runs cannot support a meaningful median; need at least 3",
                self.timed_runs
            )));
        }
        Ok(())
    }
}

/// What one engine produced for one cell; the cross-engine equality gate
/// compares these before timings are accepted.
enum CellOutput {
    Labeling(crate::engine::ComponentLabeling),
    Count(usize),
    Motif(Vec<crate::engine::MotifBinding>),
    Scores(crate::engine::PageRankScores),
}

impl CellOutput {
    fn rows(&self) -> u64 {
        match self {
            CellOutput::Labeling(l) => l.len() as u64,
            CellOutput::Count(_) => 1,
            CellOutput::Motif(m) => m.len() as u64,
            CellOutput::Scores(s) => s.len() as u64,
        }
    }

    fn matches(&self, other: &CellOutput) -> bool {
        match (self, other) {
            (CellOutput::Labeling(a), CellOutput::Labeling(b)) => a == b,
            (CellOutput::Count(a), CellOutput::Count(b)) => a == b,
            (CellOutput::Motif(a), CellOutput::Motif(b)) => a == b,
            (CellOutput::Scores(a), CellOutput::Scores(b)) => {
                // Float accumulation differs legitimately between engines;
                // agreement within 1e-6 per vertex is the correctness bar.
                matches!(a.max_abs_difference(b), Some(d) if d <= 1e-6)
            }
            _ => false,
        }
    }
}

/// Runs every `(spec, query, engine)` cell: one warm-up (whose output feeds
/// the equality gate), then `timed_runs` measured executions, recording the
/// median. Cells run sequentially so timings never contend with each other.
pub fn run_sweep(
    specs: &[SyntheticSpec],
    queries: &[QueryKind],
    engines: &[Engine],
    opts: &SweepOptions,
) -> Result<BenchmarkReport> {
    if specs.is_empty() || queries.is_empty() || engines.is_empty() {
        return Err(Error::invalid(
            "a sweep needs at least one scale, one query, and one engine",
        ));
    }
    opts.validate()?;
    let rt = parallel::Runtime::new(opts.workers)?;

    let mut rows = Vec::new();
    for spec in specs {
        let snapshots = generate(spec)?;
        let via_types = snapshots
            .iter()
            .map(|s| s.identifier_type().to_string())
            .collect();
        let (graph, _) = merge_snapshots(&snapshots)?;
        let scale = graph.vertex_count() as u64;
        let pg = parallel::partition(&graph, opts.partitions)?;

        for &query in queries {
            let mut warm: Vec<(Engine, CellOutput)> = Vec::new();
            for &engine in engines {
                let output = run_query(&graph, &pg, &rt, engine, query, &via_types, opts)?;
                if let Some((first_engine, first)) = warm.first() {
                    if !output.matches(first) {
                        return Err(Error::correctness(format!(
                            "engines disagree on {query} at scale {scale}: \
                             {first_engine} and {engine} produced different outputs"
                        )));
                    }
                }
                warm.push((engine, output));
            }

            for &(engine, ref output) in &warm {
                let output_rows = output.rows();
                let mut runs_ms = Vec::with_capacity(opts.timed_runs);
                for _ in 0..opts.timed_runs {
                    let started = Instant::now();
                    let out = run_query(&graph, &pg, &rt, engine, query, &via_types, opts)?;
                    runs_ms.push(started.elapsed().as_secs_f64() * 1e3);
                    drop(out); // deallocation is not part of the query
                }
                rows.push(BenchRow {
                    query_kind: query,
                    scale,
                    engine,
                    median_ms: median(&runs_ms),
                    runs_ms,
                    output_rows,
                });
            }
        }
    }

    rows.sort_by(|a, b| (a.query_kind, a.scale, a.engine).cmp(&(b.query_kind, b.scale, b.engine)));
    let crossover_scale = detect_crossover(&rows);
    Ok(BenchmarkReport {
        rows,
        crossover_scale,
        host: host_descriptor(),
    })
}

fn run_query(
    graph: &PropertyGraph,
    pg: &parallel::PartitionedGraph<'_>,
    rt: &parallel::Runtime,
    engine: Engine,
    query: QueryKind,
    via_types: &std::collections::BTreeSet<String>,
    opts: &SweepOptions,
) -> Result<CellOutput> {
    Ok(match (query, engine) {
        (QueryKind::ComponentsFull, Engine::Local) => {
            CellOutput::Labeling(local::connected_components(graph))
        }
        (QueryKind::ComponentsFull, Engine::Parallel) => {
            CellOutput::Labeling(parallel::connected_components(pg, rt))
        }
        // The count asymmetry under test: the local engine counts during
        // union-find and never builds rows; the parallel engine has no
        // cheaper path than converging the full labeling first.
        (QueryKind::ComponentsCount, Engine::Local) => {
            CellOutput::Count(local::count_components(graph))
        }
        (QueryKind::ComponentsCount, Engine::Parallel) => {
            CellOutput::Count(parallel::connected_components(pg, rt).component_count())
        }
        (QueryKind::MotifFull, Engine::Local) => {
            CellOutput::Motif(local::two_hop_match(graph, USER_VTYPE, via_types))
        }
        (QueryKind::MotifFull, Engine::Parallel) => {
            CellOutput::Motif(parallel::two_hop_match(pg, rt, USER_VTYPE, via_types))
        }
        (QueryKind::Pagerank, Engine::Local) => {
            CellOutput::Scores(local::pagerank(graph, opts.pagerank)?)
        }
        (QueryKind::Pagerank, Engine::Parallel) => {
            CellOutput::Scores(parallel::pagerank(pg, rt, opts.pagerank)?)
        }
    })
}

fn median(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

fn host_descriptor() -> String {
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    format!(
        "{} {}, {cores} hardware thread{}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        if cores == 1 { "" } else { "s" }
    )
}

/// Per-scale components_full winners, ascending by scale. Ties go to the
/// local engine: when timings are indistinguishable the simpler engine is
/// the right default.
fn full_output_winners(rows: &[BenchRow]) -> Vec<(u64, Engine)> {
    let mut winners: Vec<(u64, Engine)> = Vec::new();
    let mut best: std::collections::BTreeMap<u64, (f64, Engine)> = Default::default();
    for row in rows {
        if row.query_kind != QueryKind::ComponentsFull {
            continue;
        }
        let entry = best
            .entry(row.scale)
            .or_insert((f64::INFINITY, Engine::Local));
        let faster =
            row.median_ms < entry.0 || (row.median_ms == entry.0 && row.engine == Engine::Local);
        if faster {
            *entry = (row.median_ms, row.engine);
        }
    }
    for (scale, (_, engine)) in best {
        winners.push((scale, engine));
    }
    winners
}

/// Finds the components_full crossover: the winner must flip from local to
/// parallel exactly once across the measured scales. Returns a scale
/// strictly between the two scales around the flip. Anything else (no flip,
/// several flips, parallel winning the small end) yields `None`.
pub fn detect_crossover(rows: &[BenchRow]) -> Option<u64> {
    let winners = full_output_winners(rows);
    let flips: Vec<usize> = winners
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].1 != w[1].1)
        .map(|(i, _)| i)
        .collect();
    match flips.as_slice() {
        [i] if winners[*i].1 == Engine::Local => {
            let (s1, s2) = (winners[*i].0, winners[*i + 1].0);
            Some(s1 + ((s2 - s1) / 2).max(1))
        }
        _ => None,
    }
}

/// Derives router thresholds from a measured sweep so the decision table
/// agrees with every measured winner:
/// the small-graph threshold becomes the largest local-winning scale, and
/// the large-graph threshold sits at the detected crossover. Fails when the
/// report shows no usable components_full crossover.
pub fn calibrate_router(report: &BenchmarkReport) -> Result<RouterConfig> {
    let winners = full_output_winners(&report.rows);
    if winners.is_empty() {
        return Err(Error::invalid(
            "calibration needs components_full measurements for both engines",
        ));
    }
    let crossover = detect_crossover(&report.rows).ok_or_else(|| {
        let locals = winners.iter().filter(|(_, e)| *e == Engine::Local).count();
        Error::invalid(if locals == winners.len() {
            "no crossover: the local engine won at every measured scale; widen the sweep upward"
        } else if locals == 0 {
            "no crossover: the parallel engine won at every measured scale; widen the sweep downward"
        } else {
            "no single crossover: measured winners flip more than once; re-run the sweep or adjust scales"
        })
    })?;

    let small = winners
        .iter()
        .filter(|(_, e)| *e == Engine::Local)
        .map(|(s, _)| *s)
        .max()
        .expect("a detected crossover implies a local winner");
    let config = RouterConfig {
        small_graph_vertex_threshold: small,
        large_graph_vertex_threshold: crossover,
        ..RouterConfig::default()
    };
    config.validate()?;
    replay(report, config)?;
    Ok(config)
}

/// Re-runs the decision table over every fully measured cell and insists it
/// picks the measured winner. The decision table reads vertex count and
/// output rows only, so replay sets stats straight from the report rows.
fn replay(report: &BenchmarkReport, config: RouterConfig) -> Result<()> {
    let mut cells: std::collections::BTreeMap<(QueryKind, u64), Vec<&BenchRow>> =
        Default::default();
    for row in &report.rows {
        cells
            .entry((row.query_kind, row.scale))
            .or_default()
            .push(row);
    }
    for ((query, scale), rows) in cells {
        let (Some(local), Some(parallel)) = (
            rows.iter().find(|r| r.engine == Engine::Local),
            rows.iter().find(|r| r.engine == Engine::Parallel),
        ) else {
            continue; // a single-engine cell has no measured winner
        };
        let measured = if local.median_ms <= parallel.median_ms {
            Engine::Local
        } else {
            Engine::Parallel
        };
        let choice = choose_engine(
            GraphStats {
                vertex_count: scale,
                edge_count: 0, // the decision table never reads edges
                query_kind: query,
                estimated_output_rows: local.output_rows,
            },
            config,
        )?;
        if choice.engine != measured {
            return Err(Error::invalid(format!(
                "calibrated thresholds disagree with the measurement for {query} at scale \
                 {scale}: measured winner {measured}, routed {}",
                choice.engine
            )));
        }
    }
    Ok(())
}

/// One degree-cap evaluation row. `lost_percentage` is in percent, 0 to 100.
#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub cap: u32,
    pub edges_after: u64,
    pub lost_percentage: f64,
}

/// Loss rows for ascending caps over one generated graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub edges_before: u64,
    pub rows: Vec<LossRow>,
}

/// Applies each cap to the same generated graph and reports the retained
/// edge count and the loss percentage. Loss never increases as the cap
/// grows, the shape production accuracy/runtime trade-offs are judged by.
pub fn loss_curve(spec: &SyntheticSpec, caps: &[u32]) -> Result<LossCurve> {
    if caps.is_empty() {
        return Err(Error::invalid("loss curve needs at least one cap"));
    }
    if caps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("caps must be strictly ascending"));
    }
    let snapshots = generate(spec)?;
    let (graph, _) = merge_snapshots(&snapshots)?;

    let mut rows = Vec::with_capacity(caps.len());
    for &cap in caps {
        let (_, report) = degree_cap(&graph, cap)?;
        rows.push(LossRow {
            cap,
            edges_after: report.edges_after,
            lost_percentage: report.lost_percentage() * 100.0,
        });
    }
    Ok(LossCurve {
        edges_before: graph.edge_count() as u64,
        rows,
    })
}

/// Report CSV: a comment header with host and crossover, then one row per
/// cell.
pub fn report_csv(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# host: {}\n", report.host));
    match report.crossover_scale {
        Some(s) => out.push_str(&format!("# crossover_scale: {s}\n")),
        None => out.push_str("# crossover_scale: none\n"),
    }
    out.push_str("query_kind,scale,engine,median_ms,output_rows\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{:.3},{}\n",
            row.query_kind, row.scale, row.engine, row.median_ms, row.output_rows
        ));
    }
    out
}

/// Long-format CSV with every individual timed run, for plotting spreads.
pub fn runs_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("query_kind,scale,engine,run,wall_ms\n");
    for row in &report.rows {
        for (i, ms) in row.runs_ms.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{:.3}\n",
                row.query_kind, row.scale, row.engine, i, ms
            ));
        }
    }
    out
}

/// Parses a file produced by [`report_csv`]. Individual runs are not part
/// of the report format; parsed rows carry just the median. The crossover
/// is recomputed from the parsed rows rather than trusted from the comment.
pub fn parse_report_csv(text: &str) -> Result<BenchmarkReport> {
    let mut rows = Vec::new();
    let mut host = String::from("unknown");
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix("# host: ") {
            host = rest.to_string();
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line != "query_kind,scale,engine,median_ms,output_rows" {
                return Err(Error::invalid(format!(
                    "line {}: expected the report header, found {line:?}",
                    i + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::invalid(format!(
                "line {}: expected 5 fields, found {}",
                i + 1,
                fields.len()
            )));
        }
        let bad = |what: &str| Error::invalid(format!("line {}: bad {what}: {line:?}", i + 1));
        let median_ms: f64 = fields[3].parse().map_err(|_| bad("median_ms"))?;
        rows.push(BenchRow {
            query_kind: fields[0].parse()?,
            scale: fields[1].parse().map_err(|_| bad("scale"))?,
            engine: fields[2].parse()?,
            median_ms,
            runs_ms: vec![median_ms],
            output_rows: fields[4].parse().map_err(|_| bad("output_rows"))?,
        });
    }
    if !saw_header {
        return Err(Error::invalid(
            "not a benchmark report: header line missing",
        ));
    }
    let crossover_scale = detect_crossover(&rows);
    Ok(BenchmarkReport {
        rows,
        crossover_scale,
        host,
    })
}

/// Loss-curve CSV, one row per cap.
pub fn loss_csv(curve: &LossCurve) -> String {
    let mut out = String::from("cap,edges_after,lost_percentage\n");
    for row in &curve.rows {
        out.push_str(&format!(
            "{},{},{:.6}\n",
            row.cap, row.edges_after, row.lost_percentage
        ));
    }
    out
}
