//! Snapshot ingestion: reading daily edge-snapshot files, merging them into
//! one property graph, and persisting query results.
//!
//! A snapshot file is UTF-8 text, one edge per line:
//!
//! ```text
//! src_vtype:src_vid<TAB>dst_vtype:dst_vid[<TAB>edge_label]
//! ```
//!
//! The third field defaults to `links_to`. Blank lines and lines starting
//! with `#` are skipped. Malformed lines are rejected with their line number
//! and the read aborts only when the reject fraction passes a configurable
//! threshold; production dumps are allowed a little dirt, but a corrupt file
//! must not slide through silently.

mod persist;

pub use persist::{persist_labeling, persist_pairs, read_labeling, read_pairs};

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{validate_name, Edge, PropertyGraph, VertexRef};

/// Vertex type that denotes an account in every pipeline.
pub const USER_VTYPE: &str = "user";

/// Edge label assumed when a snapshot line has no label field.
pub const DEFAULT_EDGE_LABEL: &str = "links_to";

/// One day's worth of user-to-identifier edges, all sharing the identifier
/// vertex type on the destination side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSnapshot {
    name: String,
    identifier_type: String,
    edges: Vec<Edge>,
}

impl EdgeSnapshot {
    /// Builds a snapshot, enforcing that every edge points at the declared
    /// identifier type. Source vertices are usually `user` but that is not
    /// enforced here; pipelines filter on type where it matters.
    pub fn new(
        name: impl Into<String>,
        identifier_type: impl Into<String>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let name = name.into();
        let identifier_type = identifier_type.into();
        if identifier_type.is_empty() {
            return Err(Error::invalid(format!(
                "snapshot {name:?} has an empty identifier type"
            )));
        }
        for e in &edges {
            if e.dst().vtype() != identifier_type {
                return Err(Error::invalid(format!(
                    "snapshot {name:?} declares identifier type {identifier_type:?} \
                     but contains an edge to {}",
                    e.dst()
                )));
            }
        }
        Ok(EdgeSnapshot {
            name,
            identifier_type,
            edges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identifier_type(&self) -> &str {
        &self.identifier_type
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A line the reader refused, kept verbatim (truncated) for the log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedLine {
    pub line_number: u64,
    pub reason: String,
    pub content: String,
}

impl fmt::Display for RejectedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}: {} ({:?})",
            self.line_number, self.reason, self.content
        )
    }
}

/// Accounting for one snapshot read. `parsed + rejects.len()` always equals
/// [`ReadReport::data_lines`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadReport {
    pub path: PathBuf,
    pub total_lines: u64,
    pub comment_lines: u64,
    pub blank_lines: u64,
    pub parsed: u64,
    pub rejects: Vec<RejectedLine>,
}

impl ReadReport {
    /// Lines that were expected to carry an edge.
    pub fn data_lines(&self) -> u64 {
        self.total_lines - self.comment_lines - self.blank_lines
    }

    pub fn reject_fraction(&self) -> f64 {
        let data = self.data_lines();
        if data == 0 {
            0.0
        } else {
            self.rejects.len() as f64 / data as f64
        }
    }
}

/// Tunables for [`read_snapshot_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReadOptions {
    /// Field separator within a line.
    pub delimiter: char,
    /// Abort the read when the reject fraction exceeds this. 0 tolerates no
    /// rejects; 1 never aborts.
    pub max_reject_fraction: f64,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            delimiter: '\t',
            max_reject_fraction: 0.01,
        }
    }
}

impl ReadOptions {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.max_reject_fraction) {
            return Err(Error::invalid(format!(
                "max reject fraction {} is not within 0..=1",
                self.max_reject_fraction
            )));
        }
        Ok(())
    }
}

/// Reads one snapshot file with default options. The snapshot name is the
/// file stem, so `email-2022-01-01.tsv` becomes `email-2022-01-01`.
pub fn read_snapshot(
    path: impl AsRef<Path>,
    identifier_type: &str,
) -> Result<(EdgeSnapshot, ReadReport)> {
    read_snapshot_with(path, identifier_type, &ReadOptions::default())
}

pub fn read_snapshot_with(
    path: impl AsRef<Path>,
    identifier_type: &str,
    options: &ReadOptions,
) -> Result<(EdgeSnapshot, ReadReport)> {
    let path = path.as_ref();
    options.validate()?;
    if identifier_type.is_empty() {
        return Err(Error::invalid(format!(
            "identifier type for {} is empty",
            path.display()
        )));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut report = ReadReport {
        path: path.to_path_buf(),
        total_lines: 0,
        comment_lines: 0,
        blank_lines: 0,
        parsed: 0,
        rejects: Vec::new(),
    };
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        report.total_lines += 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            report.blank_lines += 1;
            continue;
        }
        if line.starts_with('#') {
            report.comment_lines += 1;
            continue;
        }
        match parse_line(line, options.delimiter, identifier_type) {
            Ok(edge) => {
                report.parsed += 1;
                edges.push(edge);
            }
            Err(reason) => report.rejects.push(RejectedLine {
                line_number: i as u64 + 1,
                reason,
                content: truncate(line, 160),
            }),
        }
    }

    if report.reject_fraction() > options.max_reject_fraction {
        return Err(Error::invalid(format!(
            "{}: {} of {} data lines rejected, over the configured limit of {}; first reject: {}",
            path.display(),
            report.rejects.len(),
            report.data_lines(),
            options.max_reject_fraction,
            report.rejects[0],
        )));
    }

    let name = snapshot_name(path);
    let snapshot = EdgeSnapshot::new(name, identifier_type, edges)?;
    Ok((snapshot, report))
}

fn snapshot_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Writes a snapshot in the wire format [`read_snapshot`] accepts, always
/// with an explicit label field. Edges keep their in-memory order, so a
/// given snapshot serializes byte-identically every time.
pub fn write_snapshot(snapshot: &EdgeSnapshot, path: impl AsRef<Path>) -> Result<()> {
    use std::io::Write as _;
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    for edge in snapshot.edges() {
        writeln!(w, "{}\t{}\t{}", edge.src(), edge.dst(), edge.label()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn parse_line(
    line: &str,
    delimiter: char,
    identifier_type: &str,
) -> std::result::Result<Edge, String> {
    let fields: Vec<&str> = line.split(delimiter).collect();
    if fields.len() < 2 || fields.len() > 3 {
        return Err(format!("expected 2 or 3 fields, found {}", fields.len()));
    }
    let src = VertexRef::parse(fields[0]).map_err(|e| e.to_string())?;
    let dst = VertexRef::parse(fields[1]).map_err(|e| e.to_string())?;
    if dst.vtype() != identifier_type {
        return Err(format!(
            "destination type {:?} does not match the snapshot's identifier type {:?}",
            dst.vtype(),
            identifier_type
        ));
    }
    let label = fields.get(2).copied().unwrap_or(DEFAULT_EDGE_LABEL);
    validate_name(label, "edge label", &line).map_err(|e| e.to_string())?;
    Ok(Edge::new(src, dst, label))
}

fn truncate(s: &str, max: usize) -> String {
    if s.len() <= max {
        return s.to_string();
    }
    let mut end = max;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    format!("{}...", &s[..end])
}

/// Per-snapshot edge counts recorded when snapshots are merged, in input
/// order. Names may repeat when the same snapshot is fed twice; the merge
/// itself is a set union, so feeding a snapshot twice changes nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeReport {
    pub per_snapshot: Vec<(String, u64)>,
}

impl MergeReport {
    pub fn total_input_edges(&self) -> u64 {
        self.per_snapshot.iter().map(|(_, n)| n).sum()
    }
}

/// Unions snapshots into one deduplicated property graph. Identifier
/// re-assignment across days shows up as multiple edges per identifier and
/// is preserved as such: the union keeps every distinct link.
pub fn merge_snapshots(snapshots: &[EdgeSnapshot]) -> Result<(PropertyGraph, MergeReport)> {
    if snapshots.is_empty() {
        return Err(Error::invalid("cannot merge zero snapshots"));
    }
    let report = MergeReport {
        per_snapshot: snapshots
            .iter()
            .map(|s| (s.name.clone(), s.edges.len() as u64))
            .collect(),
    };
    let edges: Vec<Edge> = snapshots
        .iter()
        .flat_map(|s| s.edges.iter().cloned())
        .collect();
    let graph = PropertyGraph::build(Vec::new(), edges)?;
    Ok((graph, report))
}

/// One line of a snapshot manifest: which file to read and how.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub identifier_type: String,
    /// Field delimiter for this file; manifests may override the default
    /// tab with a third field (`tab`, `comma`, `semicolon`, `space`, or a
    /// single literal character).
    pub delimiter: char,
}

/// A parsed manifest: the list of snapshot files one ingestion run covers,
/// plus where the merged result should land.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotManifest {
    pub entries: Vec<ManifestEntry>,
    pub output: PathBuf,
}

impl SnapshotManifest {
    /// Parses a manifest file: one `path<TAB>identifier_type` entry per
    /// line, optional third delimiter field, `#` comments. Relative entry
    /// paths are resolved against the manifest's own directory. The output
    /// target is not part of the file format; callers supply it.
    pub fn from_file(path: impl AsRef<Path>, output: impl Into<PathBuf>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));

        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::invalid(format!(
                    "{} line {}: expected `path<TAB>identifier_type[<TAB>delimiter]`, found {} fields",
                    path.display(),
                    i + 1,
                    fields.len()
                )));
            }
            if fields[1].is_empty() {
                return Err(Error::invalid(format!(
                    "{} line {}: identifier type is empty",
                    path.display(),
                    i + 1
                )));
            }
            let delimiter = match fields.get(2).copied() {
                None => '\t',
                Some(spec) => parse_delimiter(spec).ok_or_else(|| {
                    Error::invalid(format!(
                        "{} line {}: unrecognized delimiter {spec:?}",
                        path.display(),
                        i + 1
                    ))
                })?,
            };
            let entry_path = Path::new(fields[0]);
            let resolved = if entry_path.is_absolute() {
                entry_path.to_path_buf()
            } else {
                base.join(entry_path)
            };
            entries.push(ManifestEntry {
                path: resolved,
                identifier_type: fields[1].to_string(),
                delimiter,
            });
        }
        if entries.is_empty() {
            return Err(Error::invalid(format!(
                "manifest {} lists no snapshot files",
                path.display()
            )));
        }
        Ok(SnapshotManifest {
            entries,
            output: output.into(),
        })
    }

    /// Reads every listed snapshot. Entries are independent, so failures
    /// name the offending file.
    pub fn load(&self, options: &ReadOptions) -> Result<Vec<(EdgeSnapshot, ReadReport)>> {
        self.entries
            .iter()
            .map(|entry| {
                let per_file = ReadOptions {
                    delimiter: entry.delimiter,
                    ..options.clone()
                };
                read_snapshot_with(&entry.path, &entry.identifier_type, &per_file)
            })
            .collect()
    }

    /// Identifier types covered by the manifest, deduplicated.
    pub fn identifier_types(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .map(|e| e.identifier_type.clone())
            .collect()
    }
}

fn parse_delimiter(spec: &str) -> Option<char> {
    match spec {
        "tab" => Some('\t'),
        "comma" => Some(','),
        "semicolon" => Some(';'),
        "space" => Some(' '),
        _ => {
            let mut chars = spec.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Some(c),
                _ => None,
            }
        }
    }
}
