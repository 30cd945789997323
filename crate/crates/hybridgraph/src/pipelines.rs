//! The two production pipelines, end to end: multi-account detection and
//! combined connected users. Each one merges daily snapshots, picks an
//! engine (explicitly or through the router), runs the query, and projects
//! the result down to user-facing rows.
//!
//! Combined connected users ships in two strategies that must agree: the
//! legacy one computes components per snapshot and stitches the results
//! through a user/component meta-graph, the unified one builds a single
//! merged graph and computes components once. Their agreement on every
//! input is the correctness premise for retiring the legacy pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::engine::{local, parallel, ComponentLabeling, Engine};
use crate::error::{Error, Result};
use crate::etl::{merge_snapshots, EdgeSnapshot, USER_VTYPE};
use crate::graph::{degree_cap, DegreeCapReport, Edge, PropertyGraph, VertexRef};
use crate::router::{choose_engine, GraphStats, QueryKind, RouterConfig};

/// Engine selection as callers express it: a fixed engine, or `auto` to let
/// the router decide from the merged graph's stats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineSelection {
    Fixed(Engine),
    Auto,
}

impl fmt::Display for EngineSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineSelection::Fixed(e) => e.fmt(f),
            EngineSelection::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for EngineSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            Ok(EngineSelection::Auto)
        } else {
            Engine::from_str(s).map(EngineSelection::Fixed)
        }
    }
}

/// Execution knobs shared by all pipelines.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Partition count for the parallel engine.
    pub partitions: usize,
    /// Worker threads for the parallel engine; `None` uses the machine's
    /// available parallelism.
    pub workers: Option<usize>,
    /// Thresholds consulted when the engine selection is `auto`.
    pub router_config: RouterConfig,
    /// Restrict multi-account matching to these identifier types. `None`
    /// matches across every identifier type the snapshots declare.
    pub via_types: Option<BTreeSet<String>>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            partitions: 32,
            workers: None,
            router_config: RouterConfig::default(),
            via_types: None,
        }
    }
}

/// Which combined-connected-users construction produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Legacy,
    Unified,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Legacy => "legacy",
            Strategy::Unified => "unified",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a result came from: the snapshots that fed it and any degree cap
/// applied before querying. Snapshot names are sorted and listed once each.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub snapshots: Vec<String>,
    pub cap: Option<u32>,
    pub cap_report: Option<DegreeCapReport>,
    /// Identifier types the motif matched across (multi-account only).
    pub via_types: Option<Vec<String>>,
}

impl Provenance {
    fn new(snapshots: &[EdgeSnapshot]) -> Self {
        let names: BTreeSet<&str> = snapshots.iter().map(|s| s.name()).collect();
        Provenance {
            snapshots: names.into_iter().map(str::to_string).collect(),
            cap: None,
            cap_report: None,
            via_types: None,
        }
    }
}

/// A pipeline's payload plus everything needed to audit the run. Wall time
/// is informational and deliberately excluded from the provenance lines, so
/// repeated runs over the same inputs stay byte-identical on disk.
#[derive(Debug, Clone)]
pub struct PipelineResult<T> {
    pub payload: T,
    pub strategy: Strategy,
    pub engine: Engine,
    pub wall: Duration,
    pub provenance: Provenance,
}

impl<T> PipelineResult<T> {
    /// Renders provenance as deterministic `key=value` lines for the
    /// sidecar file written next to persisted results.
    pub fn provenance_lines(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("strategy={}\n", self.strategy));
        out.push_str(&format!("engine={}\n", self.engine));
        for name in &self.provenance.snapshots {
            out.push_str(&format!("snapshot={name}\n"));
        }
        if let Some(cap) = self.provenance.cap {
            out.push_str(&format!("cap={cap}\n"));
        }
        if let Some(report) = &self.provenance.cap_report {
            out.push_str(&format!("cap_edges_before={}\n", report.edges_before));
            out.push_str(&format!("cap_edges_after={}\n", report.edges_after));
            out.push_str(&format!(
                "cap_lost_percentage={:.6}\n",
                report.lost_percentage() * 100.0
            ));
        }
        if let Some(vias) = &self.provenance.via_types {
            for via in vias {
                out.push_str(&format!("via_type={via}\n"));
            }
        }
        out
    }
}

/// Accounts believed to belong to the same person: the deduplicated pair
/// set (smaller ref first) plus the same data grouped per user. The two
/// views are symmetric-closed: `b` is in `grouping[a]` exactly when `a` is
/// in `grouping[b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SameUserPairs {
    pairs: Vec<(VertexRef, VertexRef)>,
    grouping: BTreeMap<VertexRef, Vec<VertexRef>>,
}

impl SameUserPairs {
    /// Normalizes, sorts, and deduplicates. Self-pairs are rejected: an
    /// account cannot be its own duplicate.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexRef, VertexRef)>) -> Result<Self> {
        let mut normalized: Vec<(VertexRef, VertexRef)> = pairs
            .into_iter()
            .map(|(a, b)| {
                if a == b {
                    return Err(Error::invalid(format!("self-pair for {a}")));
                }
                Ok(if a < b { (a, b) } else { (b, a) })
            })
            .collect::<Result<_>>()?;
        normalized.sort_unstable();
        normalized.dedup();

        let mut grouping: BTreeMap<VertexRef, Vec<VertexRef>> = BTreeMap::new();
        for (a, b) in &normalized {
            grouping.entry(a.clone()).or_default().push(b.clone());
            grouping.entry(b.clone()).or_default().push(a.clone());
        }
        // Pairs are sorted, so each `grouping[a]` received its `b` entries
        // ascending; the reverse entries need one sort.
        for matches in grouping.values_mut() {
            matches.sort_unstable();
        }
        Ok(SameUserPairs {
            pairs: normalized,
            grouping,
        })
    }

    pub fn pairs(&self) -> &[(VertexRef, VertexRef)] {
        &self.pairs
    }

    pub fn grouping(&self) -> &BTreeMap<VertexRef, Vec<VertexRef>> {
        &self.grouping
    }

    pub fn matches_of(&self, user: &VertexRef) -> &[VertexRef] {
        self.grouping.get(user).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Finds accounts that share at least one identifier: merge the snapshots,
/// optionally cap runaway identifier degrees, match the two-hop motif
/// `(user)-(identifier)-(user)`, and drop the identifier column.
pub fn multi_account_detection(
    snapshots: &[EdgeSnapshot],
    cap: Option<u32>,
    engine: EngineSelection,
    opts: &PipelineOptions,
) -> Result<PipelineResult<SameUserPairs>> {
    let started = Instant::now();
    let (merged, _) = merge_snapshots(snapshots)?;
    let mut provenance = Provenance::new(snapshots);
    provenance.cap = cap;

    let graph = match cap {
        None => merged,
        Some(cap) => {
            let (capped, report) = degree_cap(&merged, cap)?;
            provenance.cap_report = Some(report);
            capped
        }
    };

    let via_types: BTreeSet<String> = match &opts.via_types {
        Some(filter) => filter.clone(),
        None => snapshots
            .iter()
            .map(|s| s.identifier_type().to_string())
            .collect(),
    };
    provenance.via_types = Some(via_types.iter().cloned().collect());

    let engine = resolve_engine(
        engine,
        GraphStats {
            vertex_count: graph.vertex_count() as u64,
            edge_count: graph.edge_count() as u64,
            query_kind: QueryKind::MotifFull,
            estimated_output_rows: estimate_motif_rows(&graph, &via_types),
        },
        opts,
    )?;

    let bindings = match engine {
        Engine::Local => local::two_hop_match(&graph, USER_VTYPE, &via_types),
        Engine::Parallel => {
            let pg = parallel::partition(&graph, opts.partitions)?;
            let rt = runtime(opts)?;
            parallel::two_hop_match(&pg, &rt, USER_VTYPE, &via_types)
        }
    };

    let mut pairs: Vec<(VertexRef, VertexRef)> = bindings.into_iter().map(|m| (m.a, m.b)).collect();
    pairs.sort_unstable();
    pairs.dedup();

    Ok(PipelineResult {
        payload: SameUserPairs::from_pairs(pairs)?,
        strategy: Strategy::Unified,
        engine,
        wall: started.elapsed(),
        provenance,
    })
}

/// Combined connected users, unified strategy: one merged graph, one
/// components run, then the labeling is restricted to user vertices with
/// each component keyed by its minimum user.
pub fn combined_connected_users_unified(
    snapshots: &[EdgeSnapshot],
    engine: EngineSelection,
    opts: &PipelineOptions,
) -> Result<PipelineResult<ComponentLabeling>> {
    let started = Instant::now();
    let (graph, _) = merge_snapshots(snapshots)?;
    let provenance = Provenance::new(snapshots);

    let engine = resolve_engine(engine, components_stats(&graph), opts)?;
    let labeling = run_components(&graph, engine, opts)?;
    let users = users_only(&labeling);

    Ok(PipelineResult {
        payload: users,
        strategy: Strategy::Unified,
        engine,
        wall: started.elapsed(),
        provenance,
    })
}

/// Combined connected users, legacy strategy: components per snapshot, then
/// a meta-graph pass that links each vertex to one hub vertex per
/// per-snapshot component it belongs to. Vertices shared between snapshots
/// tie their hubs together, so users connected through any chain of
/// snapshots land in one meta-component and the final user partition
/// matches the unified strategy exactly.
pub fn combined_connected_users_legacy(
    snapshots: &[EdgeSnapshot],
    engine: EngineSelection,
    opts: &PipelineOptions,
) -> Result<PipelineResult<ComponentLabeling>> {
    let started = Instant::now();
    if snapshots.is_empty() {
        return Err(Error::invalid("cannot combine zero snapshots"));
    }
    let provenance = Provenance::new(snapshots);

    let total_vertices: u64 = {
        // Engine choice is made once, from the total work across stages.
        let mut n = 0u64;
        for s in snapshots {
            let graph = PropertyGraph::build(Vec::new(), s.edges().to_vec())?;
            n += graph.vertex_count() as u64;
        }
        n
    };

    let mut engine_resolved = None;
    let mut meta_edges: Vec<Edge> = Vec::new();
    let mut hub_count: u64 = 0;
    for snapshot in snapshots {
        let graph = PropertyGraph::build(Vec::new(), snapshot.edges().to_vec())?;
        let engine = *engine_resolved.get_or_insert(resolve_engine(
            engine,
            GraphStats {
                vertex_count: total_vertices,
                edge_count: snapshots.iter().map(|s| s.len() as u64).sum(),
                query_kind: QueryKind::ComponentsFull,
                estimated_output_rows: total_vertices,
            },
            opts,
        )?);
        let labeling = run_components(&graph, engine, opts)?;

        // One hub vertex per per-snapshot component. Every vertex links to
        // its hub, not just users: cross-snapshot chains may run through a
        // shared identifier no user has in common. Hub ids are allocated in
        // labeling order, so the meta-graph is deterministic.
        let mut hub_of: HashMap<VertexRef, u64> = HashMap::new();
        for (v, rep) in labeling.iter() {
            let hub = *hub_of.entry(rep.clone()).or_insert_with(|| {
                hub_count += 1;
                hub_count - 1
            });
            meta_edges.push(Edge::new(
                v.clone(),
                VertexRef::new("snapshot_component", hub),
                "in_component",
            ));
        }
    }
    let engine = engine_resolved.expect("snapshots is non-empty");

    let meta = PropertyGraph::build(Vec::new(), meta_edges)?;
    let combined = run_components(&meta, engine, opts)?;
    let users = users_only(&combined);

    Ok(PipelineResult {
        payload: users,
        strategy: Strategy::Legacy,
        engine,
        wall: started.elapsed(),
        provenance,
    })
}

fn components_stats(graph: &PropertyGraph) -> GraphStats {
    let users = graph
        .vertices()
        .iter()
        .filter(|v| v.vtype() == USER_VTYPE)
        .count() as u64;
    GraphStats {
        vertex_count: graph.vertex_count() as u64,
        edge_count: graph.edge_count() as u64,
        query_kind: QueryKind::ComponentsFull,
        estimated_output_rows: users,
    }
}

/// Upper bound on motif output: each identifier with in-degree `d` yields at
/// most `d * (d - 1) / 2` pairs. Parallel edges inflate `d`, which only
/// makes the bound looser.
fn estimate_motif_rows(graph: &PropertyGraph, via_types: &BTreeSet<String>) -> u64 {
    let mut mask = vec![false; graph.type_count()];
    for name in via_types {
        if let Some(t) = graph.type_id(name) {
            mask[t as usize] = true;
        }
    }
    let mut rows = 0u64;
    for v in 0..graph.vertex_count() as u32 {
        if mask[graph.type_of(v) as usize] {
            let d = graph.in_degree(v) as u64;
            rows = rows.saturating_add(d * d.saturating_sub(1) / 2);
        }
    }
    rows
}

fn resolve_engine(
    selection: EngineSelection,
    stats: GraphStats,
    opts: &PipelineOptions,
) -> Result<Engine> {
    match selection {
        EngineSelection::Fixed(e) => Ok(e),
        EngineSelection::Auto => Ok(choose_engine(stats, opts.router_config)?.engine),
    }
}

fn runtime(opts: &PipelineOptions) -> Result<parallel::Runtime> {
    match opts.workers {
        Some(w) => parallel::Runtime::new(w),
        None => parallel::Runtime::with_default_workers(),
    }
}

fn run_components(
    graph: &PropertyGraph,
    engine: Engine,
    opts: &PipelineOptions,
) -> Result<ComponentLabeling> {
    match engine {
        Engine::Local => Ok(local::connected_components(graph)),
        Engine::Parallel => {
            let pg = parallel::partition(graph, opts.partitions)?;
            let rt = runtime(opts)?;
            Ok(parallel::connected_components(&pg, &rt))
        }
    }
}

/// Restricts a labeling to user vertices and remaps each component's
/// representative to its minimum user. Components without users disappear;
/// that is the output contract, identifier vertices never reach result rows.
fn users_only(labeling: &ComponentLabeling) -> ComponentLabeling {
    let mut min_user: HashMap<&VertexRef, &VertexRef> = HashMap::new();
    for (v, rep) in labeling.iter() {
        // Iteration ascends, so the first user seen per rep is its minimum.
        if v.vtype() == USER_VTYPE {
            min_user.entry(rep).or_insert(v);
        }
    }
    let rows: BTreeMap<VertexRef, VertexRef> = labeling
        .iter()
        .filter(|(v, _)| v.vtype() == USER_VTYPE)
        .map(|(v, rep)| (v.clone(), (*min_user[rep]).clone()))
        .collect();
    ComponentLabeling::from_rows_unchecked(rows)
}
