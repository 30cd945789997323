//! The single-machine engine.
//!
//! Queries run directly against the graph's adjacency indexes on one thread,
//! and full results are materialized row by row into ordered maps, the shape
//! a database hands to its client. That makes small graphs and scalar
//! answers extremely cheap: counting components skips result assembly
//! entirely and is just a union-find pass with a live counter. The flip side
//! is that producing millions of result rows costs real time, which is
//! exactly where the partitioned engine takes over.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{ComponentLabeling, MotifBinding, PageRankOptions, PageRankScores};
use crate::error::Result;
use crate::graph::PropertyGraph;

/// Union-find with union by size and path halving. `components` tracks the
/// live component count so counting needs no relabeling.
struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grandparent = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grandparent;
            x = grandparent;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.components -= 1;
    }
}

fn union_all(graph: &PropertyGraph) -> DisjointSet {
    // Connectivity ignores direction and labels; self-loops are no-ops.
    let mut dsu = DisjointSet::new(graph.vertex_count());
    for rec in graph.edge_recs() {
        dsu.union(rec.src, rec.dst);
    }
    dsu
}

/// Labels every vertex with its component representative, the minimum
/// `(vtype, vid)` vertex of the component. Two vertices share a
/// representative exactly when an undirected path connects them.
pub fn connected_components(graph: &PropertyGraph) -> ComponentLabeling {
    let n = graph.vertex_count();
    let mut dsu = union_all(graph);
    let vertices = graph.vertices();
    // The vertex table is sorted, so an ascending scan reaches each
    // component's minimum vertex first.
    let mut rep_of_root = vec![u32::MAX; n];
    let mut rows: BTreeMap<_, _> = BTreeMap::new();
    for v in 0..n as u32 {
        let root = dsu.find(v);
        if rep_of_root[root as usize] == u32::MAX {
            rep_of_root[root as usize] = v;
        }
        let rep = rep_of_root[root as usize];
        rows.insert(vertices[v as usize].clone(), vertices[rep as usize].clone());
    }
    ComponentLabeling::from_rows_unchecked(rows)
}

/// Component count only: the scalar fast path. No representatives are
/// resolved and no result rows are built.
pub fn count_components(graph: &PropertyGraph) -> usize {
    union_all(graph).components
}

/// All `(a) -> (via) <- (b)` matches where `a` and `b` are distinct vertices
/// of `endpoint_type` and `via`'s type is in `via_types`. Each unordered
/// endpoint pair is reported once per shared middle vertex, sorted by
/// `(a, via, b)`. Runs via direct reverse-adjacency lookups per middle
/// vertex.
pub fn two_hop_match(
    graph: &PropertyGraph,
    endpoint_type: &str,
    via_types: &BTreeSet<String>,
) -> Vec<MotifBinding> {
    let Some(endpoint) = graph.type_id(endpoint_type) else {
        return Vec::new();
    };
    let mut via_mask = vec![false; graph.type_count()];
    for name in via_types {
        if let Some(t) = graph.type_id(name) {
            via_mask[t as usize] = true;
        }
    }

    let vertices = graph.vertices();
    let recs = graph.edge_recs();
    let mut out = Vec::new();
    let mut candidates: Vec<u32> = Vec::new();
    for via in 0..graph.vertex_count() as u32 {
        if !via_mask[graph.type_of(via) as usize] {
            continue;
        }
        // In-edge indices come sorted by source, so duplicates from
        // multi-label edges sit adjacent.
        candidates.clear();
        for i in graph.in_edge_indices(via) {
            let src = recs[i as usize].src;
            if graph.type_of(src) == endpoint {
                candidates.push(src);
            }
        }
        if graph.is_undirected() {
            for rec in graph.out_recs(via) {
                if graph.type_of(rec.dst) == endpoint {
                    candidates.push(rec.dst);
                }
            }
            candidates.sort_unstable();
        }
        candidates.dedup();
        for i in 0..candidates.len() {
            for j in i + 1..candidates.len() {
                out.push(MotifBinding {
                    a: vertices[candidates[i] as usize].clone(),
                    via: vertices[via as usize].clone(),
                    b: vertices[candidates[j] as usize].clone(),
                });
            }
        }
    }
    out.sort_unstable();
    out
}

/// Power iteration over distinct arcs, pushing each vertex's share along its
/// out-arcs. Dangling mass is redistributed uniformly every iteration, so
/// scores stay a probability distribution throughout.
pub fn pagerank(graph: &PropertyGraph, opts: PageRankOptions) -> Result<PageRankScores> {
    opts.validate()?;
    let n = graph.vertex_count();
    if n == 0 {
        return Ok(PageRankScores::from_rows_unchecked(BTreeMap::new()));
    }

    let arcs = graph.distinct_arcs();
    let mut offsets = vec![0u32; n + 1];
    for &(src, _) in &arcs {
        offsets[src as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let targets: Vec<u32> = arcs.iter().map(|&(_, dst)| dst).collect();
    let dangling: Vec<u32> = (0..n as u32)
        .filter(|&v| offsets[v as usize] == offsets[v as usize + 1])
        .collect();

    let nf = n as f64;
    let d = opts.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..opts.max_iters {
        let dangling_mass: f64 = dangling.iter().map(|&v| x[v as usize]).sum();
        let base = (1.0 - d) / nf + d * dangling_mass / nf;
        next.fill(base);
        for u in 0..n {
            let span = offsets[u] as usize..offsets[u + 1] as usize;
            if span.is_empty() {
                continue;
            }
            let share = d * x[u] / span.len() as f64;
            for &t in &targets[span] {
                next[t as usize] += share;
            }
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if delta < opts.tol {
            break;
        }
    }

    let mut rows = BTreeMap::new();
    for (i, v) in graph.vertices().iter().enumerate() {
        rows.insert(v.clone(), x[i]);
    }
    Ok(PageRankScores::from_rows_unchecked(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Directedness, Edge, PropertyGraph, VertexRef};

    fn v(t: &str, id: u64) -> VertexRef {
        VertexRef::new(t, id)
    }

    fn link(a: VertexRef, b: VertexRef) -> Edge {
        Edge::new(a, b, "links_to")
    }

    /// Accounts 1-2 share an email, 2-3 share a phone.
    fn fixture() -> PropertyGraph {
        PropertyGraph::build(
            vec![],
            vec![
                link(v("user", 1), v("email", 1)),
                link(v("user", 2), v("email", 1)),
                link(v("user", 2), v("phone", 1)),
                link(v("user", 3), v("phone", 1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fixture_is_one_component_under_the_minimum_vertex() {
        let labeling = connected_components(&fixture());
        assert_eq!(labeling.component_count(), 1);
        for (_, rep) in labeling.iter() {
            assert_eq!(*rep, v("email", 1)); // minimum (vtype, vid) overall
        }
    }

    #[test]
    fn direction_does_not_matter_for_connectivity() {
        let forward = PropertyGraph::build(vec![], vec![link(v("user", 1), v("user", 2))]).unwrap();
        let backward =
            PropertyGraph::build(vec![], vec![link(v("user", 2), v("user", 1))]).unwrap();
        assert_eq!(
            connected_components(&forward).same_component(&v("user", 1), &v("user", 2)),
            Some(true)
        );
        assert_eq!(count_components(&backward), 1);
    }

    #[test]
    fn isolated_vertices_are_their_own_components() {
        let g = PropertyGraph::build(
            vec![v("user", 7), v("user", 8)],
            vec![link(v("user", 1), v("user", 2))],
        )
        .unwrap();
        let labeling = connected_components(&g);
        assert_eq!(labeling.component_count(), 3);
        assert_eq!(labeling.representative(&v("user", 7)), Some(&v("user", 7)));
        assert_eq!(count_components(&g), 3);
    }

    #[test]
    fn self_loops_do_not_merge_anything() {
        let g = PropertyGraph::build(vec![v("user", 2)], vec![link(v("user", 1), v("user", 1))])
            .unwrap();
        assert_eq!(count_components(&g), 2);
    }

    #[test]
    fn count_matches_full_labeling() {
        let g = fixture();
        assert_eq!(
            count_components(&g),
            connected_components(&g).component_count()
        );
    }

    #[test]
    fn fixture_motif_finds_exactly_the_two_shared_identifiers() {
        let vias: BTreeSet<String> = ["email".to_string(), "phone".to_string()].into();
        let got = two_hop_match(&fixture(), "user", &vias);
        assert_eq!(
            got,
            vec![
                MotifBinding::new(v("user", 1), v("email", 1), v("user", 2)),
                MotifBinding::new(v("user", 2), v("phone", 1), v("user", 3)),
            ]
        );
    }

    #[test]
    fn motif_respects_the_via_type_filter() {
        let only_phone: BTreeSet<String> = ["phone".to_string()].into();
        let got = two_hop_match(&fixture(), "user", &only_phone);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].via, v("phone", 1));
    }

    #[test]
    fn motif_on_unknown_types_is_empty() {
        let vias: BTreeSet<String> = ["email".to_string()].into();
        assert!(two_hop_match(&fixture(), "bot", &vias).is_empty());
        assert!(two_hop_match(&fixture(), "user", &BTreeSet::new()).is_empty());
    }

    #[test]
    fn multi_label_parallel_edges_bind_once() {
        let g = PropertyGraph::build(
            vec![],
            vec![
                Edge::new(v("user", 1), v("email", 1), "links_to"),
                Edge::new(v("user", 1), v("email", 1), "verified_by"),
                Edge::new(v("user", 2), v("email", 1), "links_to"),
            ],
        )
        .unwrap();
        let vias: BTreeSet<String> = ["email".to_string()].into();
        assert_eq!(two_hop_match(&g, "user", &vias).len(), 1);
    }

    #[test]
    fn single_vertex_pagerank_owns_all_mass() {
        let g = PropertyGraph::build(vec![v("user", 1)], vec![]).unwrap();
        let scores = pagerank(&g, PageRankOptions::default()).unwrap();
        assert!((scores.score(&v("user", 1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_two_cycle_splits_evenly() {
        let g = PropertyGraph::build(
            vec![],
            vec![link(v("a", 1), v("a", 2)), link(v("a", 2), v("a", 1))],
        )
        .unwrap();
        let scores = pagerank(&g, PageRankOptions::default()).unwrap();
        assert!((scores.score(&v("a", 1)).unwrap() - 0.5).abs() < 1e-9);
        assert!((scores.score(&v("a", 2)).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn scores_always_sum_to_one() {
        let g = fixture(); // has dangling vertices (identifiers)
        let scores = pagerank(&g, PageRankOptions::default()).unwrap();
        assert!((scores.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn undirected_two_cycle_equals_directed_both_ways() {
        let undirected = PropertyGraph::builder()
            .directedness(Directedness::Undirected)
            .edge(link(v("a", 1), v("a", 2)))
            .build()
            .unwrap();
        let scores = pagerank(&undirected, PageRankOptions::default()).unwrap();
        assert!((scores.score(&v("a", 1)).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn empty_graph_pagerank_is_empty() {
        let g = PropertyGraph::build(vec![], vec![]).unwrap();
        assert!(pagerank(&g, PageRankOptions::default()).unwrap().is_empty());
    }
}
