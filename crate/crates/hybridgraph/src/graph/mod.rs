//! Typed property graph: the shared substrate both engines operate on.
//!
//! Vertices are namespaced by a type string ("user", "email", ...) so that
//! numeric ids from different id spaces never collide. Graphs are immutable
//! once built; construction canonicalizes everything (vertices sorted and
//! deduplicated, edges sorted and deduplicated, labels interned in sorted
//! order) so that two builds from the same logical input are equal and every
//! downstream traversal is deterministic.

mod degree_cap;

pub use degree_cap::{degree_cap, DegreeCapReport};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A typed vertex reference: vertex type plus 64-bit id, unique within the
/// type. Ordering is by `(vtype, vid)`, which is the canonical order used for
/// representatives, output files, and tie-breaking everywhere in the crate.
#[derive(Debug, Clone, Eq, Hash)]
pub struct VertexRef {
    vtype: Arc<str>,
    vid: u64,
}

impl VertexRef {
    pub fn new(vtype: impl Into<Arc<str>>, vid: u64) -> Self {
        VertexRef {
            vtype: vtype.into(),
            vid,
        }
    }

    pub fn vtype(&self) -> &str {
        &self.vtype
    }

    pub fn vid(&self) -> u64 {
        self.vid
    }

    pub(crate) fn vtype_arc(&self) -> &Arc<str> {
        &self.vtype
    }

    pub(crate) fn with_interned(&self, vtype: Arc<str>) -> Self {
        debug_assert_eq!(*vtype, *self.vtype);
        VertexRef {
            vtype,
            vid: self.vid,
        }
    }

    /// Parses the `vtype:vid` wire form, e.g. `user:42`.
    pub fn parse(text: &str) -> Result<Self> {
        let (vtype, vid) = text
            .rsplit_once(':')
            .ok_or_else(|| Error::invalid(format!("vertex ref {text:?} is missing ':'")))?;
        let vid = vid
            .parse::<u64>()
            .map_err(|_| Error::invalid(format!("vertex ref {text:?} has a non-numeric id")))?;
        let v = VertexRef::new(vtype, vid);
        v.validate()?;
        Ok(v)
    }

    /// Checks the type-name rules that keep refs representable in every
    /// output format we emit: non-empty, no ':' (ref delimiter), no ','
    /// (CSV), no whitespace or control characters (TSV).
    pub fn validate(&self) -> Result<()> {
        validate_name(&self.vtype, "vertex type", self)
    }
}

impl PartialEq for VertexRef {
    fn eq(&self, other: &Self) -> bool {
        self.vid == other.vid
            && (Arc::ptr_eq(&self.vtype, &other.vtype) || self.vtype == other.vtype)
    }
}

impl Ord for VertexRef {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if !Arc::ptr_eq(&self.vtype, &other.vtype) {
            let by_type = self.vtype.cmp(&other.vtype);
            if by_type != std::cmp::Ordering::Equal {
                return by_type;
            }
        }
        self.vid.cmp(&other.vid)
    }
}

impl PartialOrd for VertexRef {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.vtype, self.vid)
    }
}

pub(crate) fn validate_name(name: &str, what: &str, context: &dyn fmt::Display) -> Result<()> {
    if name.is_empty() {
        return Err(Error::invalid(format!("{what} is empty in {context}")));
    }
    if let Some(bad) = name
        .chars()
        .find(|c| *c == ':' || *c == ',' || c.is_whitespace() || c.is_control())
    {
        return Err(Error::invalid(format!(
            "{what} contains forbidden character {bad:?} in {context}"
        )));
    }
    Ok(())
}

/// A labeled edge between two vertices. Identity for deduplication and
/// ordering is the `(src, dst, label)` triple; properties ride along but do
/// not participate in identity (the first occurrence of a duplicate edge
/// keeps its properties).
#[derive(Debug, Clone, Eq)]
pub struct Edge {
    src: VertexRef,
    dst: VertexRef,
    label: Arc<str>,
    props: Option<BTreeMap<String, String>>,
}

impl Edge {
    pub fn new(src: VertexRef, dst: VertexRef, label: impl Into<Arc<str>>) -> Self {
        Edge {
            src,
            dst,
            label: label.into(),
            props: None,
        }
    }

    pub fn with_props(mut self, props: BTreeMap<String, String>) -> Self {
        self.props = Some(props);
        self
    }

    pub fn src(&self) -> &VertexRef {
        &self.src
    }

    pub fn dst(&self) -> &VertexRef {
        &self.dst
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn props(&self) -> Option<&BTreeMap<String, String>> {
        self.props.as_ref()
    }
}

impl PartialEq for Edge {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && *self.label == *other.label
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.src
            .cmp(&other.src)
            .then_with(|| self.dst.cmp(&other.dst))
            .then_with(|| self.label.cmp(&other.label))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -[{}]-> {}", self.src, self.label, self.dst)
    }
}

/// How stored edges are interpreted by direction-sensitive operations
/// (adjacency, motif matching, ranking). Connectivity always treats edges as
/// bidirectional regardless of this flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directedness {
    Directed,
    Undirected,
}

/// Traversal direction for adjacency queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    /// Every incident edge exactly once (self-loops included once).
    Both,
}

/// Dense edge record over vertex indices; the engines' working currency.
/// `src`/`dst` index into the sorted vertex table, `label` into the sorted
/// label table, so record order equals semantic `(src, dst, label)` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct EdgeRec {
    pub src: u32,
    pub dst: u32,
    pub label: u16,
}

/// An immutable typed property graph with canonical internal ordering and
/// O(1) vertex/edge counts. Build once via [`PropertyGraph::build`] or
/// [`GraphBuilder`]; all query operations are read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyGraph {
    directedness: Directedness,
    /// Sorted ascending by `(vtype, vid)`; index in this table is the dense
    /// vertex id used everywhere internally. Shared with result types.
    vertices: Arc<Vec<VertexRef>>,
    vertex_ids: HashMap<VertexRef, u32>,
    /// Distinct vertex type names, sorted; parallel `vertex_types` maps each
    /// vertex to its type index.
    types: Vec<Arc<str>>,
    vertex_types: Vec<u16>,
    /// Distinct edge labels, sorted, so label index order is label order.
    labels: Vec<Arc<str>>,
    /// Sorted by `(src, dst, label)`, deduplicated.
    edges: Vec<EdgeRec>,
    /// Offsets into `edges` per source vertex (the out-adjacency index).
    out_offsets: Vec<u32>,
    /// Edge indices sorted by `(dst, src, label)` plus offsets per target
    /// vertex (the in-adjacency index).
    in_order: Vec<u32>,
    in_offsets: Vec<u32>,
    vertex_props: HashMap<u32, BTreeMap<String, String>>,
    edge_props: HashMap<u32, BTreeMap<String, String>>,
}

impl PropertyGraph {
    /// Builds a directed graph from explicit vertices plus edges. Endpoint
    /// vertices are added automatically, duplicates collapse, and the result
    /// is canonical: the same logical input always builds an equal graph.
    pub fn build(vertices: Vec<VertexRef>, edges: Vec<Edge>) -> Result<Self> {
        GraphBuilder::new().vertices(vertices).edges(edges).build()
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    /// All vertices in ascending `(vtype, vid)` order.
    pub fn vertices(&self) -> &[VertexRef] {
        &self.vertices
    }

    pub fn contains_vertex(&self, v: &VertexRef) -> bool {
        self.vertex_ids.contains_key(v)
    }

    pub fn vertex_props(&self, v: &VertexRef) -> Option<&BTreeMap<String, String>> {
        self.vertex_ids
            .get(v)
            .and_then(|id| self.vertex_props.get(id))
    }

    /// Materializes all edges in canonical `(src, dst, label)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edges.len() as u32).map(move |i| self.materialize_edge(i))
    }

    /// Complete neighbor list of `v` in the requested direction, as
    /// `(edge, neighbor)` pairs sorted by neighbor then label. On graphs
    /// flagged undirected every direction returns all incident edges.
    pub fn adjacency(&self, v: &VertexRef, direction: Direction) -> Result<Vec<(Edge, VertexRef)>> {
        let id = self
            .vertex_ids
            .get(v)
            .copied()
            .ok_or_else(|| Error::invalid(format!("unknown vertex {v}")))?;
        let direction = match self.directedness {
            Directedness::Directed => direction,
            Directedness::Undirected => Direction::Both,
        };
        let mut hits: Vec<(u32, u32)> = Vec::new(); // (edge index, neighbor id)
        match direction {
            Direction::Out => {
                for i in self.out_edge_indices(id) {
                    hits.push((i, self.edges[i as usize].dst));
                }
            }
            Direction::In => {
                for i in self.in_edge_indices(id) {
                    hits.push((i, self.edges[i as usize].src));
                }
            }
            Direction::Both => {
                for i in self.out_edge_indices(id) {
                    hits.push((i, self.edges[i as usize].dst));
                }
                for i in self.in_edge_indices(id) {
                    let rec = self.edges[i as usize];
                    if rec.src != rec.dst {
                        hits.push((i, rec.src));
                    } // self-loops already collected on the out side
                }
            }
        }
        hits.sort_unstable_by_key(|&(i, nbr)| (nbr, self.edges[i as usize].label, i));
        Ok(hits
            .into_iter()
            .map(|(i, nbr)| {
                (
                    self.materialize_edge(i),
                    self.vertices[nbr as usize].clone(),
                )
            })
            .collect())
    }

    pub(crate) fn materialize_edge(&self, index: u32) -> Edge {
        let rec = self.edges[index as usize];
        let mut e = Edge::new(
            self.vertices[rec.src as usize].clone(),
            self.vertices[rec.dst as usize].clone(),
            Arc::clone(&self.labels[rec.label as usize]),
        );
        if let Some(props) = self.edge_props.get(&index) {
            e = e.with_props(props.clone());
        }
        e
    }

    // Dense accessors for the engines.

    pub(crate) fn vertex_table(&self) -> &Arc<Vec<VertexRef>> {
        &self.vertices
    }

    pub(crate) fn edge_recs(&self) -> &[EdgeRec] {
        &self.edges
    }

    pub(crate) fn label_str(&self, label: u16) -> &Arc<str> {
        &self.labels[label as usize]
    }

    pub(crate) fn type_of(&self, vertex: u32) -> u16 {
        self.vertex_types[vertex as usize]
    }

    /// Type index for a type name, if any vertex has it.
    pub(crate) fn type_id(&self, name: &str) -> Option<u16> {
        self.types
            .binary_search_by(|t| (**t).cmp(name))
            .ok()
            .map(|i| i as u16)
    }

    pub(crate) fn type_count(&self) -> usize {
        self.types.len()
    }

    /// Out-edges of `v` as indices into `edge_recs()`, in `(dst, label)`
    /// order (a contiguous range, since records are sorted by source first).
    pub(crate) fn out_edge_indices(&self, v: u32) -> std::ops::Range<u32> {
        self.out_offsets[v as usize]..self.out_offsets[v as usize + 1]
    }

    pub(crate) fn out_recs(&self, v: u32) -> &[EdgeRec] {
        &self.edges
            [self.out_offsets[v as usize] as usize..self.out_offsets[v as usize + 1] as usize]
    }

    /// In-edges of `v` as indices into `edge_recs()`, in `(src, label)` order.
    pub(crate) fn in_edge_indices(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.in_order
            [self.in_offsets[v as usize] as usize..self.in_offsets[v as usize + 1] as usize]
            .iter()
            .copied()
    }

    pub(crate) fn in_degree(&self, v: u32) -> u32 {
        self.in_offsets[v as usize + 1] - self.in_offsets[v as usize]
    }

    pub(crate) fn is_undirected(&self) -> bool {
        self.directedness == Directedness::Undirected
    }

    /// Distinct `(src, dst)` arc pairs in ascending order: parallel edges
    /// (same endpoints, different labels) collapse to one arc, self-loops
    /// appear once, and undirected graphs contribute both orientations.
    /// This is the ranking engines' view of the graph.
    pub(crate) fn distinct_arcs(&self) -> Vec<(u32, u32)> {
        let mut arcs: Vec<(u32, u32)> =
            Vec::with_capacity(self.edges.len() * if self.is_undirected() { 2 } else { 1 });
        arcs.extend(self.edges.iter().map(|r| (r.src, r.dst)));
        if self.is_undirected() {
            arcs.extend(
                self.edges
                    .iter()
                    .filter(|r| r.src != r.dst)
                    .map(|r| (r.dst, r.src)),
            );
            arcs.sort_unstable();
        }
        arcs.dedup(); // record order is already (src, dst) sorted when directed
        arcs
    }
}

/// Staged construction of a [`PropertyGraph`], with optional vertex
/// properties and directedness. All validation happens in [`Self::build`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    directedness: Option<Directedness>,
    vertices: Vec<VertexRef>,
    vertex_props: Vec<(VertexRef, BTreeMap<String, String>)>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder::default()
    }

    pub fn directedness(mut self, d: Directedness) -> Self {
        self.directedness = Some(d);
        self
    }

    pub fn vertex(mut self, v: VertexRef) -> Self {
        self.vertices.push(v);
        self
    }

    pub fn vertex_with_props(mut self, v: VertexRef, props: BTreeMap<String, String>) -> Self {
        self.vertices.push(v.clone());
        self.vertex_props.push((v, props));
        self
    }

    pub fn vertices(mut self, vs: impl IntoIterator<Item = VertexRef>) -> Self {
        self.vertices.extend(vs);
        self
    }

    pub fn edge(mut self, e: Edge) -> Self {
        self.edges.push(e);
        self
    }

    pub fn edges(mut self, es: impl IntoIterator<Item = Edge>) -> Self {
        self.edges.extend(es);
        self
    }

    pub fn build(self) -> Result<PropertyGraph> {
        let directedness = self.directedness.unwrap_or(Directedness::Directed);

        for v in &self.vertices {
            v.validate()?;
        }
        for e in &self.edges {
            e.src().validate()?;
            e.dst().validate()?;
            validate_name(e.label(), "edge label", e)?;
        }

        // Intern type names so comparisons are pointer-fast and the type
        // table is canonical (sorted).
        let mut type_set: Vec<Arc<str>> = self
            .vertices
            .iter()
            .map(|v| Arc::clone(v.vtype_arc()))
            .chain(self.edges.iter().flat_map(|e| {
                [
                    Arc::clone(e.src().vtype_arc()),
                    Arc::clone(e.dst().vtype_arc()),
                ]
            }))
            .collect();
        type_set.sort_unstable();
        type_set.dedup();
        if type_set.len() > u16::MAX as usize {
            return Err(Error::invalid("more than 65535 distinct vertex types"));
        }
        let intern = |v: &VertexRef| -> VertexRef {
            let i = type_set
                .binary_search_by(|t| (**t).cmp(v.vtype()))
                .expect("type already collected");
            v.with_interned(Arc::clone(&type_set[i]))
        };

        // Canonical vertex table: explicit vertices plus all endpoints,
        // sorted and deduplicated.
        let mut table: Vec<VertexRef> =
            Vec::with_capacity(self.vertices.len() + self.edges.len() * 2);
        table.extend(self.vertices.iter().map(&intern));
        for e in &self.edges {
            table.push(intern(e.src()));
            table.push(intern(e.dst()));
        }
        table.sort_unstable();
        table.dedup();
        if table.len() > u32::MAX as usize {
            return Err(Error::invalid("more than 2^32 vertices"));
        }

        let mut vertex_ids: HashMap<VertexRef, u32> = HashMap::with_capacity(table.len());
        for (i, v) in table.iter().enumerate() {
            vertex_ids.insert(v.clone(), i as u32);
        }
        let vertex_types: Vec<u16> = table
            .iter()
            .map(|v| {
                type_set
                    .binary_search_by(|t| (**t).cmp(v.vtype()))
                    .expect("type already collected") as u16
            })
            .collect();

        // Canonical label table, sorted so label index order is label order.
        let mut labels: Vec<Arc<str>> = self.edges.iter().map(|e| Arc::clone(&e.label)).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() > u16::MAX as usize {
            return Err(Error::invalid("more than 65535 distinct edge labels"));
        }

        // Translate, sort, deduplicate edges. Stable tie-break on original
        // position lets the first duplicate keep its properties.
        let mut recs: Vec<(EdgeRec, u32)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(orig, e)| {
                let rec = EdgeRec {
                    src: vertex_ids[e.src()],
                    dst: vertex_ids[e.dst()],
                    label: labels
                        .binary_search_by(|l| (**l).cmp(e.label()))
                        .expect("label already collected") as u16,
                };
                (rec, orig as u32)
            })
            .collect();
        recs.sort_unstable();
        recs.dedup_by_key(|(rec, _)| *rec);

        let mut edge_props: HashMap<u32, BTreeMap<String, String>> = HashMap::new();
        let edges: Vec<EdgeRec> = recs
            .iter()
            .enumerate()
            .map(|(i, (rec, orig))| {
                if let Some(props) = self.edges[*orig as usize].props() {
                    edge_props.insert(i as u32, props.clone());
                }
                *rec
            })
            .collect();

        let mut vertex_props: HashMap<u32, BTreeMap<String, String>> = HashMap::new();
        for (v, props) in self.vertex_props {
            let id = vertex_ids[&intern(&v)];
            vertex_props.entry(id).or_default().extend(props);
        }

        let n = table.len();
        let mut out_offsets = vec![0u32; n + 1];
        for rec in &edges {
            out_offsets[rec.src as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }

        let mut in_order: Vec<u32> = (0..edges.len() as u32).collect();
        in_order.sort_unstable_by_key(|&i| {
            let rec = edges[i as usize];
            (rec.dst, rec.src, rec.label)
        });
        let mut in_offsets = vec![0u32; n + 1];
        for rec in &edges {
            in_offsets[rec.dst as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }

        Ok(PropertyGraph {
            directedness,
            vertices: Arc::new(table),
            vertex_ids,
            types: type_set,
            vertex_types,
            labels,
            edges,
            out_offsets,
            in_order,
            in_offsets,
            vertex_props,
            edge_props,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(t: &str, id: u64) -> VertexRef {
        VertexRef::new(t, id)
    }

    fn fixture() -> PropertyGraph {
        // Three accounts sharing identifiers pairwise: 1-2 via an email,
        // 2-3 via a phone.
        let edges = vec![
            Edge::new(v("user", 1), v("email", 1), "links_to"),
            Edge::new(v("user", 2), v("email", 1), "links_to"),
            Edge::new(v("user", 2), v("phone", 1), "links_to"),
            Edge::new(v("user", 3), v("phone", 1), "links_to"),
        ];
        PropertyGraph::build(vec![], edges).unwrap()
    }

    #[test]
    fn vertex_ref_parse_display_round_trip() {
        let v = VertexRef::parse("user:42").unwrap();
        assert_eq!(v.vtype(), "user");
        assert_eq!(v.vid(), 42);
        assert_eq!(v.to_string(), "user:42");
        assert_eq!(VertexRef::parse(&v.to_string()).unwrap(), v);
    }

    #[test]
    fn vertex_ref_rejects_garbage() {
        assert!(VertexRef::parse("user").is_err());
        assert!(VertexRef::parse("user:abc").is_err());
        assert!(VertexRef::parse(":1").is_err());
        assert!(VertexRef::new("", 1).validate().is_err());
        assert!(VertexRef::new("user id", 1).validate().is_err());
        assert!(VertexRef::new("a,b", 1).validate().is_err());
    }

    #[test]
    fn ordering_is_type_then_id() {
        assert!(v("email", 9) < v("user", 1));
        assert!(v("user", 1) < v("user", 2));
        assert!(v("user", 9) < v("user", 10)); // numeric, not lexicographic
    }

    #[test]
    fn counts_and_auto_added_endpoints() {
        let g = fixture();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 4);
        assert!(g.contains_vertex(&v("email", 1)));
        assert!(!g.contains_vertex(&v("email", 2)));
    }

    #[test]
    fn duplicate_edges_and_vertices_collapse() {
        let e = Edge::new(v("user", 1), v("email", 1), "links_to");
        let g = PropertyGraph::build(
            vec![v("user", 1), v("user", 1)],
            vec![e.clone(), e.clone(), e],
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn same_input_builds_equal_graph_in_any_order() {
        let edges = vec![
            Edge::new(v("user", 2), v("email", 1), "links_to"),
            Edge::new(v("user", 1), v("email", 1), "links_to"),
        ];
        let mut reversed = edges.clone();
        reversed.reverse();
        let a = PropertyGraph::build(vec![], edges).unwrap();
        let b = PropertyGraph::build(vec![v("user", 1)], reversed).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn adjacency_out_is_sorted_by_neighbor() {
        let g = fixture();
        let out: Vec<VertexRef> = g
            .adjacency(&v("user", 2), Direction::Out)
            .unwrap()
            .into_iter()
            .map(|(_, nbr)| nbr)
            .collect();
        assert_eq!(out, vec![v("email", 1), v("phone", 1)]);
    }

    #[test]
    fn adjacency_in_of_source_vertex_is_empty() {
        let g = fixture();
        assert!(g
            .adjacency(&v("user", 1), Direction::In)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn adjacency_both_counts_each_incident_edge_once() {
        // Brute-force degree oracle: count edges touching the vertex.
        let g = fixture();
        for vertex in g.vertices() {
            let brute = g
                .edges()
                .filter(|e| e.src() == vertex || e.dst() == vertex)
                .count();
            let both = g.adjacency(vertex, Direction::Both).unwrap();
            assert_eq!(both.len(), brute, "degree mismatch at {vertex}");
        }
    }

    #[test]
    fn self_loop_appears_once_in_both() {
        let g = PropertyGraph::build(
            vec![],
            vec![
                Edge::new(v("user", 1), v("user", 1), "links_to"),
                Edge::new(v("user", 1), v("user", 2), "links_to"),
            ],
        )
        .unwrap();
        let both = g.adjacency(&v("user", 1), Direction::Both).unwrap();
        assert_eq!(both.len(), 2);
    }

    #[test]
    fn undirected_graphs_ignore_direction() {
        let g = PropertyGraph::builder()
            .directedness(Directedness::Undirected)
            .edge(Edge::new(v("user", 1), v("user", 2), "knows"))
            .build()
            .unwrap();
        for dir in [Direction::Out, Direction::In, Direction::Both] {
            assert_eq!(g.adjacency(&v("user", 2), dir).unwrap().len(), 1);
        }
    }

    #[test]
    fn adjacency_of_unknown_vertex_is_an_error() {
        let g = fixture();
        assert!(g.adjacency(&v("user", 999), Direction::Out).is_err());
    }

    #[test]
    fn empty_graph_builds() {
        let g = PropertyGraph::build(vec![], vec![]).unwrap();
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn malformed_vertex_is_named_in_the_error() {
        let err = PropertyGraph::build(vec![VertexRef::new("", 7)], vec![]).unwrap_err();
        assert!(err.to_string().contains(":7"), "unhelpful error: {err}");
    }

    #[test]
    fn first_duplicate_keeps_its_props() {
        let mut props = BTreeMap::new();
        props.insert("w".to_string(), "1".to_string());
        let with = Edge::new(v("user", 1), v("email", 1), "links_to").with_props(props.clone());
        let without = Edge::new(v("user", 1), v("email", 1), "links_to");
        let g = PropertyGraph::build(vec![], vec![with, without]).unwrap();
        let edges: Vec<Edge> = g.edges().collect();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].props(), Some(&props));
    }

    #[test]
    fn edges_iterator_is_canonically_ordered() {
        let g = fixture();
        let mut prev: Option<Edge> = None;
        for e in g.edges() {
            if let Some(p) = &prev {
                assert!(*p < e);
            }
            prev = Some(e);
        }
    }
}
