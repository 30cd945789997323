//! The two query engines and their shared result types.
//!
//! [`local`] answers queries on one machine straight off the graph's
//! adjacency indexes and materializes results row by row, the way a database
//! returns them. [`parallel`] runs the same queries as barrier-synchronized
//! supersteps over hash-partitioned edge tables and keeps results in bulk
//! column form. Both produce the same observable answers; the result types
//! here compare them by content, not by representation, so every operation
//! can be cross-checked engine against engine.

pub mod local;
pub mod parallel;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::VertexRef;

/// Which engine executes a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Local,
    Parallel,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Local => "local",
            Engine::Parallel => "parallel",
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(Engine::Local),
            "parallel" => Ok(Engine::Parallel),
            other => Err(Error::invalid(format!(
                "unknown engine {other:?}, expected \"local\" or \"parallel\""
            ))),
        }
    }
}

/// A total assignment of every vertex to its connected-component
/// representative: the minimum `(vtype, vid)` vertex of the component.
/// Representatives map to themselves.
///
/// Two backings exist because the engines produce results in different
/// shapes: the local engine assembles an ordered map row by row, the
/// parallel engine keeps the sorted vertex table plus a dense representative
/// column. Lookup, iteration (ascending by vertex), and equality behave
/// identically for both.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    backing: LabelingBacking,
    component_count: usize,
}

#[derive(Debug, Clone)]
enum LabelingBacking {
    Rows(BTreeMap<VertexRef, VertexRef>),
    Columns {
        keys: Arc<Vec<VertexRef>>,
        rep_idx: Vec<u32>,
    },
}

impl ComponentLabeling {
    /// Wraps a row map that is already a valid labeling. `component_count`
    /// is derived from the self-mapped entries.
    pub(crate) fn from_rows_unchecked(rows: BTreeMap<VertexRef, VertexRef>) -> Self {
        let component_count = rows.iter().filter(|(k, v)| k == v).count();
        ComponentLabeling {
            backing: LabelingBacking::Rows(rows),
            component_count,
        }
    }

    /// Validating constructor for labelings read back from files: every
    /// representative must be present and map to itself.
    pub fn from_rows(rows: BTreeMap<VertexRef, VertexRef>) -> Result<Self> {
        for (k, rep) in &rows {
            match rows.get(rep) {
                Some(r) if r == rep => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "representative {rep} of {k} does not map to itself"
                    )))
                }
            }
        }
        Ok(Self::from_rows_unchecked(rows))
    }

    /// Wraps a dense representative column over the sorted vertex table.
    /// `rep_idx[i]` is the table index of vertex i's representative.
    pub(crate) fn from_columns(keys: Arc<Vec<VertexRef>>, rep_idx: Vec<u32>) -> Self {
        debug_assert_eq!(keys.len(), rep_idx.len());
        debug_assert!(rep_idx.iter().all(|&r| rep_idx[r as usize] == r));
        let component_count = rep_idx
            .iter()
            .enumerate()
            .filter(|(i, r)| **r as usize == *i)
            .count();
        ComponentLabeling {
            backing: LabelingBacking::Columns { keys, rep_idx },
            component_count,
        }
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Number of labeled vertices.
    pub fn len(&self) -> usize {
        match &self.backing {
            LabelingBacking::Rows(rows) => rows.len(),
            LabelingBacking::Columns { keys, .. } => keys.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn representative(&self, v: &VertexRef) -> Option<&VertexRef> {
        match &self.backing {
            LabelingBacking::Rows(rows) => rows.get(v),
            LabelingBacking::Columns { keys, rep_idx } => keys
                .binary_search(v)
                .ok()
                .map(|i| &keys[rep_idx[i] as usize]),
        }
    }

    /// Checks whether two vertices share a component; `None` when either is
    /// not labeled.
    pub fn same_component(&self, a: &VertexRef, b: &VertexRef) -> Option<bool> {
        Some(self.representative(a)? == self.representative(b)?)
    }

    /// All `(vertex, representative)` pairs in ascending vertex order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (&VertexRef, &VertexRef)> + '_> {
        match &self.backing {
            LabelingBacking::Rows(rows) => Box::new(rows.iter()),
            LabelingBacking::Columns { keys, rep_idx } => Box::new(
                keys.iter()
                    .zip(rep_idx.iter())
                    .map(move |(k, &r)| (k, &keys[r as usize])),
            ),
        }
    }
}

impl PartialEq for ComponentLabeling {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.component_count == other.component_count
            && self.iter().eq(other.iter())
    }
}

impl Eq for ComponentLabeling {}

/// Steady-state visit probabilities per vertex. Same dual backing story as
/// [`ComponentLabeling`]; iteration is ascending by vertex.
#[derive(Debug, Clone)]
pub struct PageRankScores {
    backing: ScoreBacking,
}

#[derive(Debug, Clone)]
enum ScoreBacking {
    Rows(BTreeMap<VertexRef, f64>),
    Columns {
        keys: Arc<Vec<VertexRef>>,
        scores: Vec<f64>,
    },
}

impl PageRankScores {
    pub(crate) fn from_rows_unchecked(rows: BTreeMap<VertexRef, f64>) -> Self {
        PageRankScores {
            backing: ScoreBacking::Rows(rows),
        }
    }

    pub(crate) fn from_columns(keys: Arc<Vec<VertexRef>>, scores: Vec<f64>) -> Self {
        debug_assert_eq!(keys.len(), scores.len());
        PageRankScores {
            backing: ScoreBacking::Columns { keys, scores },
        }
    }

    pub fn len(&self) -> usize {
        match &self.backing {
            ScoreBacking::Rows(rows) => rows.len(),
            ScoreBacking::Columns { keys, .. } => keys.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn score(&self, v: &VertexRef) -> Option<f64> {
        match &self.backing {
            ScoreBacking::Rows(rows) => rows.get(v).copied(),
            ScoreBacking::Columns { keys, scores } => keys.binary_search(v).ok().map(|i| scores[i]),
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = (&VertexRef, f64)> + '_> {
        match &self.backing {
            ScoreBacking::Rows(rows) => Box::new(rows.iter().map(|(k, s)| (k, *s))),
            ScoreBacking::Columns { keys, scores } => {
                Box::new(keys.iter().zip(scores.iter().copied()))
            }
        }
    }

    pub fn sum(&self) -> f64 {
        self.iter().map(|(_, s)| s).sum()
    }

    /// Largest per-vertex score difference, or `None` when the vertex sets
    /// differ.
    pub fn max_abs_difference(&self, other: &Self) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for ((va, sa), (vb, sb)) in self.iter().zip(other.iter()) {
            if va != vb {
                return None;
            }
            worst = worst.max((sa - sb).abs());
        }
        Some(worst)
    }
}

/// Power-iteration parameters. Defaults: damping 0.85, at most 100
/// iterations, stop once the L1 change drops below 1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankOptions {
    pub damping: f64,
    pub max_iters: u32,
    pub tol: f64,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            damping: 0.85,
            max_iters: 100,
            tol: 1e-8,
        }
    }
}

impl PageRankOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::invalid(format!(
                "damping must lie strictly between 0 and 1, got {}",
                self.damping
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid(format!(
                "tolerance must be a non-negative finite number, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// One two-hop match `(a) -> (via) <- (b)`: two distinct endpoint vertices
/// sharing the middle vertex. Always stored with `a < b`, and result lists
/// are sorted by `(a, via, b)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotifBinding {
    pub a: VertexRef,
    pub via: VertexRef,
    pub b: VertexRef,
}

impl MotifBinding {
    /// Builds a binding with the endpoint pair in canonical order.
    pub fn new(x: VertexRef, via: VertexRef, y: VertexRef) -> Self {
        debug_assert_ne!(x, y, "motif endpoints must be distinct");
        if x <= y {
            MotifBinding { a: x, via, b: y }
        } else {
            MotifBinding { a: y, via, b: x }
        }
    }
}

impl std::fmt::Display for MotifBinding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.via, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(t: &str, id: u64) -> VertexRef {
        VertexRef::new(t, id)
    }

    #[test]
    fn row_and_column_labelings_compare_by_content() {
        let mut rows = BTreeMap::new();
        rows.insert(v("user", 1), v("user", 1));
        rows.insert(v("user", 2), v("user", 1));
        let by_rows = ComponentLabeling::from_rows_unchecked(rows);

        let keys = Arc::new(vec![v("user", 1), v("user", 2)]);
        let by_columns = ComponentLabeling::from_columns(keys, vec![0, 0]);

        assert_eq!(by_rows, by_columns);
        assert_eq!(by_rows.component_count(), 1);
        assert_eq!(by_columns.component_count(), 1);
        assert_eq!(
            by_rows.same_component(&v("user", 1), &v("user", 2)),
            Some(true)
        );
    }

    #[test]
    fn labeling_validation_rejects_dangling_representatives() {
        let mut rows = BTreeMap::new();
        rows.insert(v("user", 2), v("user", 1));
        assert!(ComponentLabeling::from_rows(rows).is_err());

        let mut resolved = BTreeMap::new();
        resolved.insert(v("user", 1), v("user", 2));
        resolved.insert(v("user", 2), v("user", 2));
        assert!(ComponentLabeling::from_rows(resolved).is_ok());

        // a -> b -> c chains are not fully resolved labelings
        let mut unresolved = BTreeMap::new();
        unresolved.insert(v("user", 1), v("user", 2));
        unresolved.insert(v("user", 2), v("user", 3));
        unresolved.insert(v("user", 3), v("user", 3));
        assert!(ComponentLabeling::from_rows(unresolved).is_err());
    }

    #[test]
    fn motif_binding_normalizes_endpoint_order() {
        let m = MotifBinding::new(v("user", 9), v("email", 1), v("user", 2));
        assert_eq!(m.a, v("user", 2));
        assert_eq!(m.b, v("user", 9));
    }

    #[test]
    fn pagerank_options_validate() {
        assert!(PageRankOptions::default().validate().is_ok());
        assert!(PageRankOptions {
            damping: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(PageRankOptions {
            damping: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(PageRankOptions {
            max_iters: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(PageRankOptions {
            tol: -1e-9,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn engine_names_round_trip() {
        for e in [Engine::Local, Engine::Parallel] {
            assert_eq!(e.as_str().parse::<Engine>().unwrap(), e);
        }
        assert!("spark".parse::<Engine>().is_err());
    }
}
