//! The partitioned engine.
//!
//! Edges are hash-partitioned by source vertex, and every query runs as a
//! sequence of barrier-synchronized supersteps: workers process partitions
//! with no shared mutable state, emit immutable message batches, and a
//! deterministic merge applies them between supersteps. All merge operations
//! are order-independent (minimum for labels, canonically ordered sums for
//! scores), so results are bit-identical regardless of partition count or
//! worker scheduling.
//!
//! Results stay in bulk column form (dense arrays over the sorted vertex
//! table). That is the mirror image of the local engine's row-at-a-time
//! result sets: more fixed cost per superstep, far less cost per output row.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::engine::{ComponentLabeling, MotifBinding, PageRankOptions, PageRankScores};
use crate::error::{Error, Result};
use crate::graph::{Edge, PropertyGraph};

/// Fixed work-splitting granularity for dense per-vertex phases. Constant so
/// that chunk boundaries, and therefore float summation order, never depend
/// on the worker count.
const CHUNK: usize = 1 << 16;

/// Worker pool the engine executes supersteps on. The worker count is fixed
/// at construction; results never depend on it.
pub struct Runtime {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runtime {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::invalid("worker count must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("hybridgraph-worker-{i}"))
            .build()
            .map_err(|e| Error::correctness(format!("cannot build worker pool: {e}")))?;
        Ok(Runtime { pool, workers })
    }

    /// Pool sized to the machine's available parallelism.
    pub fn with_default_workers() -> Result<Self> {
        let workers = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        Runtime::new(workers)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl std::fmt::Debug for Runtime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Runtime")
            .field("workers", &self.workers)
            .finish()
    }
}

/// Stable partition hash: FNV-1a over the vertex type bytes, a zero
/// separator byte, then the little-endian id bytes. Spelled out so that
/// partition placement is reproducible across runs and platforms.
pub fn vertex_partition_hash(vtype: &str, vid: u64) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    for &b in vtype.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h ^= 0;
    h = h.wrapping_mul(PRIME);
    for b in vid.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

struct EdgePartition {
    /// Indices into the graph's canonical edge list, in canonical order.
    edge_indices: Vec<u32>,
    /// Bidirectional arc adjacency restricted to sources owned by this
    /// partition: `arc_srcs` ascending, `arc_targets[arc_offsets[i]..arc_offsets[i+1]]`
    /// are the neighbors of `arc_srcs[i]`.
    arc_srcs: Vec<u32>,
    arc_offsets: Vec<u32>,
    arc_targets: Vec<u32>,
}

/// A property graph hash-partitioned for superstep execution. Partitioning
/// is pure bookkeeping: the union of all partitions is exactly the original
/// edge multiset, and every edge lives in the partition its source hashes
/// to.
pub struct PartitionedGraph<'g> {
    graph: &'g PropertyGraph,
    num_partitions: usize,
    /// Owning partition per vertex: `vertex_partition_hash % num_partitions`.
    part_of: Vec<u16>,
    /// Local arc-source slot per vertex (+1; 0 means the vertex has no arcs).
    arc_slot: Vec<u32>,
    partitions: Vec<EdgePartition>,
}

/// Splits `graph` into `num_partitions` edge partitions keyed by the source
/// vertex's partition hash. This is the load phase of the partitioned
/// engine; queries reuse the result. Empty partitions are legal.
pub fn partition(graph: &PropertyGraph, num_partitions: usize) -> Result<PartitionedGraph<'_>> {
    if num_partitions == 0 {
        return Err(Error::invalid("partition count must be at least 1"));
    }
    if num_partitions > u16::MAX as usize {
        return Err(Error::invalid(format!(
            "partition count {num_partitions} exceeds the supported maximum of 65535"
        )));
    }
    let k = num_partitions;
    let n = graph.vertex_count();

    let part_of: Vec<u16> = graph
        .vertices()
        .iter()
        .map(|v| (vertex_partition_hash(v.vtype(), v.vid()) % k as u64) as u16)
        .collect();

    let mut edge_indices: Vec<Vec<u32>> = vec![Vec::new(); k];
    let mut arcs: Vec<Vec<(u32, u32)>> = vec![Vec::new(); k];
    for (i, rec) in graph.edge_recs().iter().enumerate() {
        edge_indices[part_of[rec.src as usize] as usize].push(i as u32);
        if rec.src != rec.dst {
            // Connectivity is undirected: store the arc in both directions,
            // each owned by its source's partition. Self-loops carry no
            // connectivity information and are skipped.
            arcs[part_of[rec.src as usize] as usize].push((rec.src, rec.dst));
            arcs[part_of[rec.dst as usize] as usize].push((rec.dst, rec.src));
        }
    }

    let mut arc_slot = vec![0u32; n];
    let partitions: Vec<EdgePartition> = edge_indices
        .into_iter()
        .zip(arcs)
        .map(|(edge_indices, mut arcs)| {
            arcs.sort_unstable();
            arcs.dedup();
            let mut arc_srcs = Vec::new();
            let mut arc_offsets = vec![0u32];
            let mut arc_targets = Vec::with_capacity(arcs.len());
            for (src, dst) in arcs {
                if arc_srcs.last() != Some(&src) {
                    arc_srcs.push(src);
                    arc_offsets.push(arc_targets.len() as u32);
                    arc_slot[src as usize] = arc_srcs.len() as u32; // slot + 1
                }
                arc_targets.push(dst);
                *arc_offsets.last_mut().unwrap() = arc_targets.len() as u32;
            }
            EdgePartition {
                edge_indices,
                arc_srcs,
                arc_offsets,
                arc_targets,
            }
        })
        .collect();

    Ok(PartitionedGraph {
        graph,
        num_partitions: k,
        part_of,
        arc_slot,
        partitions,
    })
}

impl<'g> PartitionedGraph<'g> {
    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    pub fn graph(&self) -> &'g PropertyGraph {
        self.graph
    }

    /// Which partition owns `(vtype, vid)` under this partitioning.
    pub fn partition_index(&self, vtype: &str, vid: u64) -> usize {
        (vertex_partition_hash(vtype, vid) % self.num_partitions as u64) as usize
    }

    pub fn partition_edge_count(&self, p: usize) -> usize {
        self.partitions[p].edge_indices.len()
    }

    /// Materialized edges of one partition, in canonical edge order.
    pub fn partition_edges(&self, p: usize) -> impl Iterator<Item = Edge> + '_ {
        self.partitions[p]
            .edge_indices
            .iter()
            .map(|&i| self.graph.materialize_edge(i))
    }
}

/// Observability record for one superstep. The changed count is zero exactly
/// once, at the final superstep that proves the fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperstepStats {
    pub superstep: u32,
    pub messages: u64,
    pub changed: u64,
    pub wall: Duration,
}

/// Connected components by synchronous minimum-label propagation: every
/// vertex starts as its own label, and each superstep active vertices send
/// their label along their arcs; targets keep the minimum. Labels converge
/// to each component's minimum vertex, the same canonical representative the
/// local engine picks. Runs at most `diameter + 1` supersteps on a connected
/// graph.
pub fn connected_components(pg: &PartitionedGraph<'_>, rt: &Runtime) -> ComponentLabeling {
    connected_components_traced(pg, rt).0
}

/// Like [`connected_components`], also returning per-superstep statistics.
pub fn connected_components_traced(
    pg: &PartitionedGraph<'_>,
    rt: &Runtime,
) -> (ComponentLabeling, Vec<SuperstepStats>) {
    let n = pg.graph.vertex_count();
    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut stats = Vec::new();

    // Superstep 0 treats every vertex as freshly changed.
    let mut frontier: Vec<Vec<u32>> = pg
        .partitions
        .iter()
        .map(|p| (0..p.arc_srcs.len() as u32).collect())
        .collect();
    let mut touched = vec![false; n];

    for superstep in 0.. {
        let started = Instant::now();
        let batches: Vec<Vec<(u32, u32)>> = rt.pool.install(|| {
            pg.partitions
                .par_iter()
                .zip(&frontier)
                .map(|(part, active)| {
                    let labels = &labels;
                    let mut messages = Vec::new();
                    for &slot in active {
                        let label = labels[part.arc_srcs[slot as usize] as usize];
                        let targets = &part.arc_targets[part.arc_offsets[slot as usize] as usize
                            ..part.arc_offsets[slot as usize + 1] as usize];
                        for &t in targets {
                            if label < labels[t as usize] {
                                messages.push((t, label));
                            }
                        }
                    }
                    messages
                })
                .collect()
        });

        // Barrier: merge all batches with minimum, in partition order. The
        // minimum is order-independent, so the outcome cannot depend on
        // scheduling or on the partition count.
        let message_count: u64 = batches.iter().map(|b| b.len() as u64).sum();
        let mut changed: Vec<u32> = Vec::new();
        for batch in &batches {
            for &(t, label) in batch {
                if label < labels[t as usize] {
                    labels[t as usize] = label;
                    if !touched[t as usize] {
                        touched[t as usize] = true;
                        changed.push(t);
                    }
                }
            }
        }
        for &t in &changed {
            touched[t as usize] = false;
        }
        changed.sort_unstable();

        stats.push(SuperstepStats {
            superstep: superstep as u32,
            messages: message_count,
            changed: changed.len() as u64,
            wall: started.elapsed(),
        });
        if changed.is_empty() {
            break;
        }

        frontier = vec![Vec::new(); pg.num_partitions];
        for &t in &changed {
            let slot = pg.arc_slot[t as usize];
            if slot > 0 {
                frontier[pg.part_of[t as usize] as usize].push(slot - 1);
            }
        }
    }

    let labeling = ComponentLabeling::from_columns(Arc::clone(pg.graph.vertex_table()), labels);
    (labeling, stats)
}

/// Two-hop matching as a three-phase bulk job: per-partition extraction of
/// `(via, endpoint)` pairs, a shuffle keyed on the middle vertex, then
/// per-group pair generation and a canonical global sort. Binding set and
/// order are identical to the local engine's.
pub fn two_hop_match(
    pg: &PartitionedGraph<'_>,
    rt: &Runtime,
    endpoint_type: &str,
    via_types: &BTreeSet<String>,
) -> Vec<MotifBinding> {
    let graph = pg.graph;
    let Some(endpoint) = graph.type_id(endpoint_type) else {
        return Vec::new();
    };
    let mut via_mask = vec![false; graph.type_count()];
    for name in via_types {
        if let Some(t) = graph.type_id(name) {
            via_mask[t as usize] = true;
        }
    }

    // Map: extract (via, endpoint) pairs partition by partition.
    let recs = graph.edge_recs();
    let undirected = graph.is_undirected();
    let extracted: Vec<Vec<(u32, u32)>> = rt.pool.install(|| {
        pg.partitions
            .par_iter()
            .map(|part| {
                let mut pairs = Vec::new();
                for &i in &part.edge_indices {
                    let rec = recs[i as usize];
                    if via_mask[graph.type_of(rec.dst) as usize]
                        && graph.type_of(rec.src) == endpoint
                    {
                        pairs.push((rec.dst, rec.src));
                    }
                    if undirected
                        && via_mask[graph.type_of(rec.src) as usize]
                        && graph.type_of(rec.dst) == endpoint
                    {
                        pairs.push((rec.src, rec.dst));
                    }
                }
                pairs
            })
            .collect()
    });

    // Shuffle: re-key every pair to the partition owning its via vertex.
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); pg.num_partitions];
    for batch in extracted {
        for (via, endpoint_vertex) in batch {
            buckets[pg.part_of[via as usize] as usize].push((via, endpoint_vertex));
        }
    }

    // Reduce: group by via inside each bucket and emit endpoint pairs.
    let grouped: Vec<Vec<(u32, u32, u32)>> = rt.pool.install(|| {
        buckets
            .par_iter_mut()
            .map(|bucket| {
                bucket.sort_unstable();
                bucket.dedup();
                let mut triples = Vec::new();
                let mut start = 0;
                while start < bucket.len() {
                    let via = bucket[start].0;
                    let mut end = start;
                    while end < bucket.len() && bucket[end].0 == via {
                        end += 1;
                    }
                    for x in start..end {
                        for y in x + 1..end {
                            triples.push((bucket[x].1, via, bucket[y].1));
                        }
                    }
                    start = end;
                }
                triples
            })
            .collect()
    });

    let mut triples: Vec<(u32, u32, u32)> = grouped.into_iter().flatten().collect();
    triples.sort_unstable();

    // Materialize rows in fixed-size chunks; chunk order preserves the sort.
    let vertices = graph.vertices();
    let chunks: Vec<Vec<MotifBinding>> = rt.pool.install(|| {
        triples
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&(a, via, b)| MotifBinding {
                        a: vertices[a as usize].clone(),
                        via: vertices[via as usize].clone(),
                        b: vertices[b as usize].clone(),
                    })
                    .collect()
            })
            .collect()
    });
    chunks.into_iter().flatten().collect()
}

/// Power iteration, one superstep per iteration: shares are computed from
/// the previous state, and each vertex sums its incoming shares in canonical
/// in-arc order. The per-target ordered sum makes scores bit-identical for
/// any partition count and worker count. Same update rule and stopping rule
/// as the local engine, so the two agree to within float accumulation noise.
pub fn pagerank(
    pg: &PartitionedGraph<'_>,
    rt: &Runtime,
    opts: PageRankOptions,
) -> Result<PageRankScores> {
    opts.validate()?;
    let graph = pg.graph;
    let n = graph.vertex_count();
    if n == 0 {
        return Ok(PageRankScores::from_columns(
            Arc::clone(graph.vertex_table()),
            Vec::new(),
        ));
    }

    let arcs = graph.distinct_arcs(); // ascending (src, dst)
    let mut out_degree = vec![0u32; n];
    for &(src, _) in &arcs {
        out_degree[src as usize] += 1;
    }
    let dangling: Vec<u32> = (0..n as u32)
        .filter(|&v| out_degree[v as usize] == 0)
        .collect();

    // Pull-side index: in-arcs grouped by target, sources ascending.
    let mut by_dst: Vec<(u32, u32)> = arcs.iter().map(|&(src, dst)| (dst, src)).collect();
    by_dst.sort_unstable();
    let mut in_offsets = vec![0usize; n + 1];
    for &(dst, _) in &by_dst {
        in_offsets[dst as usize + 1] += 1;
    }
    for i in 0..n {
        in_offsets[i + 1] += in_offsets[i];
    }
    let in_srcs: Vec<u32> = by_dst.iter().map(|&(_, src)| src).collect();

    let nf = n as f64;
    let d = opts.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0f64; n];
    let mut shares = vec![0.0f64; n];

    rt.pool.install(|| {
        for _ in 0..opts.max_iters {
            shares
                .par_chunks_mut(CHUNK)
                .zip(x.par_chunks(CHUNK))
                .enumerate()
                .for_each(|(chunk, (shares, x))| {
                    let base = chunk * CHUNK;
                    for i in 0..x.len() {
                        let deg = out_degree[base + i];
                        shares[i] = if deg == 0 { 0.0 } else { x[i] / deg as f64 };
                    }
                });

            // Chunked partial sums combined in chunk order: deterministic.
            let dangling_mass: f64 = dangling
                .par_chunks(CHUNK)
                .map(|ids| ids.iter().map(|&v| x[v as usize]).sum::<f64>())
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            let base_score = (1.0 - d) / nf + d * dangling_mass / nf;

            next.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(chunk, next)| {
                    let first = chunk * CHUNK;
                    for (i, slot) in next.iter_mut().enumerate() {
                        let v = first + i;
                        let mut pulled = 0.0f64;
                        for &src in &in_srcs[in_offsets[v]..in_offsets[v + 1]] {
                            pulled += shares[src as usize];
                        }
                        *slot = base_score + d * pulled;
                    }
                });

            let delta: f64 = x
                .par_chunks(CHUNK)
                .zip(next.par_chunks(CHUNK))
                .map(|(a, b)| a.iter().zip(b).map(|(ai, bi)| (ai - bi).abs()).sum::<f64>())
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            std::mem::swap(&mut x, &mut next);
            if delta < opts.tol {
                break;
            }
        }
    });

    Ok(PageRankScores::from_columns(
        Arc::clone(graph.vertex_table()),
        x,
    ))
}
