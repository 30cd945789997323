//! Degree capping: bounds every vertex's out- and in-degree to make graphs
//! with celebrity-style hubs tractable, while accounting precisely for what
//! was lost.

use std::collections::BTreeMap;

use super::{Edge, PropertyGraph};
use crate::error::{Error, Result};

/// What a [`degree_cap`] pass kept and dropped. `lost_percentage` is defined
/// as `1 - edges_after / edges_before` (0 for an edgeless input).
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeCapReport {
    pub cap: u32,
    pub edges_before: u64,
    pub edges_after: u64,
    /// Per edge label: (edges before, edges after).
    pub per_label: BTreeMap<String, (u64, u64)>,
}

impl DegreeCapReport {
    pub fn lost_percentage(&self) -> f64 {
        if self.edges_before == 0 {
            0.0
        } else {
            1.0 - self.edges_after as f64 / self.edges_before as f64
        }
    }
}

/// Returns a copy of `graph` in which every vertex has out-degree <= `cap`
/// and in-degree <= `cap`, plus the loss report.
///
/// Drop policy is deterministic and input-order independent: an over-cap
/// vertex keeps the `cap` edges whose neighbor sorts lowest by
/// `(vtype, vid)`, ties broken by edge label. The out-degree pass runs first,
/// then the in-degree pass runs on the survivors; dropping in-edges never
/// raises an out-degree, so one pass each suffices. Vertices are never added
/// or removed, so a cap at or above the maximum degree returns an equal
/// graph and reapplying the same cap is a no-op.
pub fn degree_cap(graph: &PropertyGraph, cap: u32) -> Result<(PropertyGraph, DegreeCapReport)> {
    if cap == 0 {
        return Err(Error::invalid(
            "degree cap must be at least 1; build an empty graph explicitly instead of capping to 0",
        ));
    }

    let m = graph.edges.len();
    let cap = cap as usize;
    let mut keep = vec![true; m];

    // Out pass: out-edge ranges are contiguous and already sorted by
    // (neighbor, label), so keeping the lowest-sorting edges means keeping
    // the first `cap` of each range.
    for v in 0..graph.vertex_count() as u32 {
        for i in graph.out_edge_indices(v).skip(cap) {
            keep[i as usize] = false;
        }
    }

    // In pass over survivors: in-edge indices per target are sorted by
    // (neighbor, label) as well.
    for v in 0..graph.vertex_count() as u32 {
        let mut kept = 0usize;
        for i in graph.in_edge_indices(v) {
            if keep[i as usize] {
                if kept == cap {
                    keep[i as usize] = false;
                } else {
                    kept += 1;
                }
            }
        }
    }

    let mut per_label: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (i, rec) in graph.edges.iter().enumerate() {
        let entry = per_label
            .entry(graph.label_str(rec.label).to_string())
            .or_insert((0, 0));
        entry.0 += 1;
        if keep[i] {
            entry.1 += 1;
        }
    }

    let kept_edges: Vec<Edge> = (0..m)
        .filter(|&i| keep[i])
        .map(|i| graph.materialize_edge(i as u32))
        .collect();
    let capped = PropertyGraph::builder()
        .directedness(graph.directedness)
        .vertices(graph.vertices().to_vec())
        .edges(kept_edges)
        .build()?;

    let report = DegreeCapReport {
        cap: cap as u32,
        edges_before: m as u64,
        edges_after: capped.edge_count() as u64,
        per_label,
    };
    Ok((capped, report))
}
