//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles use deliberately different algorithms and data structures
//! than the engines they check: flood fill instead of union-find or label
//! propagation, a nested-loop join instead of indexed or shuffled matching,
//! and a dense arc-set power iteration. Agreement between two engines alone
//! could hide a shared misunderstanding; agreement with these cannot.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use hybridgraph::engine::{ComponentLabeling, MotifBinding, PageRankOptions};
use hybridgraph::etl::{EdgeSnapshot, DEFAULT_EDGE_LABEL, USER_VTYPE};
use hybridgraph::graph::{Directedness, Edge, PropertyGraph, VertexRef};
use rand::prelude::IndexedRandom;
use rand::Rng;

/// Connected components by breadth-first flood fill over a freshly built
/// adjacency map. Edges connect both ways regardless of directedness,
/// matching the connectivity contract. Representative: the component's
/// minimum vertex.
pub fn bfs_components(graph: &PropertyGraph) -> BTreeMap<VertexRef, VertexRef> {
    let mut adjacency: HashMap<&VertexRef, Vec<&VertexRef>> = HashMap::new();
    let edges: Vec<Edge> = graph.edges().collect();
    for v in graph.vertices() {
        adjacency.entry(v).or_default();
    }
    for e in &edges {
        adjacency.entry(e.src()).or_default().push(e.dst());
        adjacency.entry(e.dst()).or_default().push(e.src());
    }

    // Seeds are visited in ascending order, so each component is first
    // reached from its minimum vertex.
    let mut seeds: Vec<&VertexRef> = adjacency.keys().copied().collect();
    seeds.sort_unstable();

    let mut labels: BTreeMap<VertexRef, VertexRef> = BTreeMap::new();
    for seed in seeds {
        if labels.contains_key(seed) {
            continue;
        }
        let mut queue = VecDeque::from([seed]);
        labels.insert(seed.clone(), seed.clone());
        while let Some(v) = queue.pop_front() {
            for &next in &adjacency[v] {
                if !labels.contains_key(next) {
                    labels.insert(next.clone(), seed.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    labels
}

/// Two-hop matches by brute force: for every candidate middle vertex, scan
/// the whole edge list for endpoint-type neighbors pointing at it (both
/// directions when the graph is undirected), then emit every distinct
/// unordered endpoint pair.
pub fn nested_loop_two_hop(
    graph: &PropertyGraph,
    endpoint_type: &str,
    via_types: &BTreeSet<String>,
) -> Vec<MotifBinding> {
    let undirected = graph.directedness() == Directedness::Undirected;
    let edges: Vec<Edge> = graph.edges().collect();
    let mut out = Vec::new();
    for via in graph.vertices() {
        if !via_types.contains(via.vtype()) {
            continue;
        }
        let mut candidates: BTreeSet<&VertexRef> = BTreeSet::new();
        for e in &edges {
            if e.dst() == via && e.src().vtype() == endpoint_type {
                candidates.insert(e.src());
            }
            if undirected && e.src() == via && e.dst().vtype() == endpoint_type {
                candidates.insert(e.dst());
            }
        }
        let candidates: Vec<&VertexRef> = candidates.into_iter().collect();
        for i in 0..candidates.len() {
            for j in i + 1..candidates.len() {
                out.push(MotifBinding {
                    a: candidates[i].clone(),
                    via: via.clone(),
                    b: candidates[j].clone(),
                });
            }
        }
    }
    out.sort_unstable();
    out
}

/// PageRank by power iteration over an independently derived dense arc set:
/// distinct `(src, dst)` pairs, reversed copies added for undirected graphs,
/// dangling mass spread uniformly, same stopping rule as the engines.
pub fn dense_pagerank(graph: &PropertyGraph, opts: PageRankOptions) -> BTreeMap<VertexRef, f64> {
    let mut vertices: Vec<VertexRef> = graph.vertices().to_vec();
    vertices.sort_unstable();
    let index: HashMap<&VertexRef, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = vertices.len();
    if n == 0 {
        return BTreeMap::new();
    }

    let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in graph.edges() {
        let (s, t) = (index[e.src()], index[e.dst()]);
        arcs.insert((s, t));
        if graph.directedness() == Directedness::Undirected && s != t {
            arcs.insert((t, s));
        }
    }
    let mut out_degree = vec![0usize; n];
    for &(s, _) in &arcs {
        out_degree[s] += 1;
    }

    let nf = n as f64;
    let d = opts.damping;
    let mut x = vec![1.0 / nf; n];
    for _ in 0..opts.max_iters {
        let dangling: f64 = (0..n).filter(|&v| out_degree[v] == 0).map(|v| x[v]).sum();
        let mut next = vec![(1.0 - d) / nf + d * dangling / nf; n];
        for &(s, t) in &arcs {
            next[t] += d * x[s] / out_degree[s] as f64;
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < opts.tol {
            break;
        }
    }

    vertices.into_iter().zip(x).collect()
}

pub fn labeling_map(labeling: &ComponentLabeling) -> BTreeMap<VertexRef, VertexRef> {
    labeling
        .iter()
        .map(|(v, rep)| (v.clone(), rep.clone()))
        .collect()
}

pub const VERTEX_TYPES: [&str; 4] = ["user", "email", "phone", "device"];
pub const EDGE_LABELS: [&str; 3] = ["links_to", "uses", "verified_by"];

/// A random typed multigraph: mixed vertex types, possible self-loops,
/// parallel edges, isolated vertices, and either directedness.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> PropertyGraph {
    let n = rng.random_range(2..=max_vertices.max(2));
    let m = rng.random_range(0..=max_edges);
    random_graph_with(rng, n, m)
}

/// Same texture as [`random_graph`] with exact vertex and edge counts.
pub fn random_graph_with(rng: &mut impl Rng, n: usize, m: usize) -> PropertyGraph {
    let type_count = rng.random_range(1..=VERTEX_TYPES.len());
    let vertices: Vec<VertexRef> = (0..n)
        .map(|rank| VertexRef::new(VERTEX_TYPES[rng.random_range(0..type_count)], rank as u64))
        .collect();

    let edges: Vec<Edge> = (0..m)
        .map(|_| {
            Edge::new(
                vertices[rng.random_range(0..n)].clone(),
                vertices[rng.random_range(0..n)].clone(),
                *EDGE_LABELS.choose(rng).expect("labels are non-empty"),
            )
        })
        .collect();

    let directedness = if rng.random_bool(0.5) {
        Directedness::Directed
    } else {
        Directedness::Undirected
    };
    PropertyGraph::builder()
        .directedness(directedness)
        .vertices(vertices)
        .edges(edges)
        .build()
        .expect("randomly generated graphs are structurally valid")
}

pub const IDENTIFIER_TYPES: [&str; 3] = ["email", "phone", "device"];

/// Random daily snapshots over shared user and identifier pools, so
/// snapshots overlap through users, identifiers, both, or neither.
pub fn random_snapshots(rng: &mut impl Rng) -> Vec<EdgeSnapshot> {
    let count = rng.random_range(1..=4);
    let user_pool = rng.random_range(3..=60u64);
    let identifier_pool = rng.random_range(2..=30u64);
    (0..count)
        .map(|day| {
            let id_type = *IDENTIFIER_TYPES.choose(rng).expect("non-empty");
            let edges: Vec<Edge> = (0..rng.random_range(1..=80))
                .map(|_| {
                    Edge::new(
                        VertexRef::new(USER_VTYPE, rng.random_range(0..user_pool)),
                        VertexRef::new(id_type, rng.random_range(0..identifier_pool)),
                        DEFAULT_EDGE_LABEL,
                    )
                })
                .collect();
            EdgeSnapshot::new(format!("{id_type}-day{day}"), id_type, edges)
                .expect("snapshot edges all target the snapshot's identifier type")
        })
        .collect()
}

/// The worked example graph: three users chained through a shared email and
/// a shared phone.
pub fn fig4_snapshots() -> Vec<EdgeSnapshot> {
    let link = |u: u64, t: &str, i: u64| {
        Edge::new(
            VertexRef::new(USER_VTYPE, u),
            VertexRef::new(t, i),
            DEFAULT_EDGE_LABEL,
        )
    };
    vec![
        EdgeSnapshot::new(
            "email-day1",
            "email",
            vec![link(1, "email", 1), link(2, "email", 1)],
        )
        .expect("valid fixture"),
        EdgeSnapshot::new(
            "phone-day1",
            "phone",
            vec![link(2, "phone", 1), link(3, "phone", 1)],
        )
        .expect("valid fixture"),
    ]
}
