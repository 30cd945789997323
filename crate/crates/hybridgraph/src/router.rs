//! Cost-based engine selection.
//!
//! One graph system does not cover every analytics job: the local engine
//! wins on small and medium graphs and on queries with tiny outputs (it
//! skips result materialization), while the partitioned engine wins once the
//! graph or the output gets large. The router encodes that operational
//! finding as an ordered threshold table rather than a fitted cost model;
//! the thresholds live in a config file so the benchmark harness can
//! re-calibrate them per host from measured crossovers.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::engine::Engine;
use crate::error::{Error, Result};

/// What a query will do, as far as routing cares: full-result component
/// labeling, a bare component count, full motif output, or rank scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum QueryKind {
    ComponentsFull,
    ComponentsCount,
    MotifFull,
    Pagerank,
}

impl QueryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryKind::ComponentsFull => "components_full",
            QueryKind::ComponentsCount => "components_count",
            QueryKind::MotifFull => "motif_full",
            QueryKind::Pagerank => "pagerank",
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "components_full" => Ok(QueryKind::ComponentsFull),
            "components_count" => Ok(QueryKind::ComponentsCount),
            "motif_full" => Ok(QueryKind::MotifFull),
            "pagerank" => Ok(QueryKind::Pagerank),
            other => Err(Error::invalid(format!("unknown query kind {other:?}"))),
        }
    }
}

/// The routing inputs: graph size plus the caller's output estimate. No
/// cardinality estimation happens here; callers supply the estimate (exact
/// for counts and labelings, an upper bound for motifs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub vertex_count: u64,
    pub edge_count: u64,
    pub query_kind: QueryKind,
    pub estimated_output_rows: u64,
}

impl GraphStats {
    fn validate(&self) -> Result<()> {
        let bound = match self.query_kind {
            QueryKind::ComponentsFull | QueryKind::Pagerank => Some(self.vertex_count),
            QueryKind::ComponentsCount => Some(1),
            QueryKind::MotifFull => None, // quadratic in the worst case; no useful bound
        };
        if let Some(bound) = bound {
            if self.estimated_output_rows > bound {
                return Err(Error::invalid(format!(
                    "estimated output of {} rows exceeds the {} bound of {} for {}",
                    self.estimated_output_rows, self.query_kind, bound, self.query_kind
                )));
            }
        }
        Ok(())
    }
}

/// Routing thresholds. Defaults reflect the shipped calibration: graphs at
/// or under a million vertices stay local, graphs at ten million or more go
/// parallel, and anything with at most ten thousand output rows stays local
/// regardless of scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouterConfig {
    pub small_graph_vertex_threshold: u64,
    pub large_graph_vertex_threshold: u64,
    pub small_output_row_threshold: u64,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            small_graph_vertex_threshold: 1_000_000,
            large_graph_vertex_threshold: 10_000_000,
            small_output_row_threshold: 10_000,
        }
    }
}

const KEY_SMALL: &str = "small_graph_vertex_threshold";
const KEY_LARGE: &str = "large_graph_vertex_threshold";
const KEY_OUTPUT: &str = "small_output_row_threshold";

impl RouterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.small_graph_vertex_threshold >= self.large_graph_vertex_threshold {
            return Err(Error::invalid(format!(
                "{KEY_SMALL} ({}) must be below {KEY_LARGE} ({})",
                self.small_graph_vertex_threshold, self.large_graph_vertex_threshold
            )));
        }
        Ok(())
    }

    /// Parses the flat `key=value` config format. Unknown and repeated keys
    /// are errors; omitted keys keep their defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen: BTreeMap<&str, u64> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!(
                    "config line {}: expected key=value, got {raw:?}",
                    i + 1
                ))
            })?;
            let key = key.trim();
            let key = [KEY_SMALL, KEY_LARGE, KEY_OUTPUT]
                .into_iter()
                .find(|k| *k == key)
                .ok_or_else(|| {
                    Error::invalid(format!("config line {}: unknown key {key:?}", i + 1))
                })?;
            let value: u64 = value.trim().parse().map_err(|_| {
                Error::invalid(format!(
                    "config line {}: {key} value {:?} is not a non-negative integer",
                    i + 1,
                    value.trim()
                ))
            })?;
            if seen.insert(key, value).is_some() {
                return Err(Error::invalid(format!(
                    "config line {}: {key} appears twice",
                    i + 1
                )));
            }
        }
        let defaults = RouterConfig::default();
        let config = RouterConfig {
            small_graph_vertex_threshold: seen
                .get(KEY_SMALL)
                .copied()
                .unwrap_or(defaults.small_graph_vertex_threshold),
            large_graph_vertex_threshold: seen
                .get(KEY_LARGE)
                .copied()
                .unwrap_or(defaults.large_graph_vertex_threshold),
            small_output_row_threshold: seen
                .get(KEY_OUTPUT)
                .copied()
                .unwrap_or(defaults.small_output_row_threshold),
        };
        config.validate()?;
        Ok(config)
    }

    /// The inverse of [`RouterConfig::parse`]: all three keys, one per line.
    pub fn to_config_text(&self) -> String {
        format!(
            "{KEY_SMALL}={}\n{KEY_LARGE}={}\n{KEY_OUTPUT}={}\n",
            self.small_graph_vertex_threshold,
            self.large_graph_vertex_threshold,
            self.small_output_row_threshold
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RouterConfig::parse(&text)
    }

    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_config_text()).map_err(|e| Error::io(path, e))
    }
}

/// The routing verdict, carrying everything needed to audit it later.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineChoice {
    pub engine: Engine,
    /// Names of the decision-table rules that fired, in evaluation order.
    /// Exactly one rule fires per decision.
    pub reasons: Vec<String>,
    pub thresholds_used: RouterConfig,
    pub stats: GraphStats,
}

/// Applies the decision table, first match wins:
///
/// 1. output rows at or under the small-output threshold → local
/// 2. vertex count at or over the large-graph threshold → parallel
/// 3. vertex count at or under the small-graph threshold → local
/// 4. otherwise → parallel
///
/// Rule 1 outranks scale because a count query on a huge graph is still
/// cheapest on the engine that never materializes rows.
pub fn choose_engine(stats: GraphStats, config: RouterConfig) -> Result<EngineChoice> {
    stats.validate()?;
    config.validate()?;
    let (engine, reason) = if stats.estimated_output_rows <= config.small_output_row_threshold {
        (Engine::Local, "small_output")
    } else if stats.vertex_count >= config.large_graph_vertex_threshold {
        (Engine::Parallel, "large_graph")
    } else if stats.vertex_count <= config.small_graph_vertex_threshold {
        (Engine::Local, "small_graph")
    } else {
        (Engine::Parallel, "medium_graph_large_output")
    };
    Ok(EngineChoice {
        engine,
        reasons: vec![reason.to_string()],
        thresholds_used: config,
        stats,
    })
}

/// Renders a choice for humans: the verdict, the rule that fired with the
/// comparison it made, the stats, and the thresholds. The threshold lines
/// are in config syntax, so they parse back to `thresholds_used` verbatim.
pub fn explain(choice: &EngineChoice) -> String {
    let stats = &choice.stats;
    let config = &choice.thresholds_used;
    let rule_line = match choice.reasons[0].as_str() {
        "small_output" => format!(
            "rule small_output: small output ({} rows <= {KEY_OUTPUT} {})",
            stats.estimated_output_rows, config.small_output_row_threshold
        ),
        "large_graph" => format!(
            "rule large_graph: large graph ({} vertices >= {KEY_LARGE} {})",
            stats.vertex_count, config.large_graph_vertex_threshold
        ),
        "small_graph" => format!(
            "rule small_graph: small or medium graph ({} vertices <= {KEY_SMALL} {})",
            stats.vertex_count, config.small_graph_vertex_threshold
        ),
        other => format!(
            "rule {other}: {} vertices between thresholds with {} output rows",
            stats.vertex_count, stats.estimated_output_rows
        ),
    };
    format!(
        "engine: {}\n{rule_line}\nstats: query_kind={} vertex_count={} edge_count={} estimated_output_rows={}\n{}",
        choice.engine,
        stats.query_kind,
        stats.vertex_count,
        stats.edge_count,
        stats.estimated_output_rows,
        config.to_config_text()
    )
}
