//! Result persistence. Component labelings and user pairs go to CSV files
//! with a header, LF line endings, and rows sorted ascending by primary key,
//! so equal results are byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::engine::ComponentLabeling;
use crate::error::{Error, Result};
use crate::graph::VertexRef;

const LABELING_HEADER: &str = "user_id,component_id";
const PAIRS_HEADER: &str = "user_a,user_b";

/// Writes `user_id,component_id` rows, one per labeled vertex, sorted by
/// vertex. Reading the file back with [`read_labeling`] reproduces the
/// labeling exactly.
pub fn persist_labeling(labeling: &ComponentLabeling, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{LABELING_HEADER}").map_err(io_err)?;
    for (vertex, rep) in labeling.iter() {
        writeln!(w, "{vertex},{rep}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a file written by [`persist_labeling`]. Validates the header, ref
/// syntax, key uniqueness, and that every referenced representative labels
/// itself.
pub fn read_labeling(path: impl AsRef<Path>) -> Result<ComponentLabeling> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    expect_header(path, lines.next(), LABELING_HEADER)?;

    let mut rows = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let (user, rep) = split_row(path, i, line)?;
        if rows.insert(user.clone(), rep).is_some() {
            return Err(Error::invalid(format!(
                "{} row {}: duplicate user_id {user}",
                path.display(),
                i + 2
            )));
        }
    }
    ComponentLabeling::from_rows(rows)
}

/// Writes `user_a,user_b` rows. Pairs are normalized so the smaller ref
/// comes first, then sorted and deduplicated; input order does not matter.
pub fn persist_pairs(pairs: &[(VertexRef, VertexRef)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut normalized: Vec<(&VertexRef, &VertexRef)> = pairs
        .iter()
        .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
        .collect();
    normalized.sort();
    normalized.dedup();

    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{PAIRS_HEADER}").map_err(io_err)?;
    for (a, b) in normalized {
        writeln!(w, "{a},{b}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a file written by [`persist_pairs`]. Each row must hold a strictly
/// ordered pair.
pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<(VertexRef, VertexRef)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    expect_header(path, lines.next(), PAIRS_HEADER)?;

    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        let (a, b) = split_row(path, i, line)?;
        if a >= b {
            return Err(Error::invalid(format!(
                "{} row {}: pair {a},{b} is not strictly ordered",
                path.display(),
                i + 2
            )));
        }
        pairs.push((a, b));
    }
    Ok(pairs)
}

fn expect_header(path: &Path, line: Option<&str>, want: &str) -> Result<()> {
    match line.map(|l| l.strip_suffix('\r').unwrap_or(l)) {
        Some(found) if found == want => Ok(()),
        found => Err(Error::invalid(format!(
            "{} does not start with the header {want:?} (found {found:?})",
            path.display()
        ))),
    }
}

fn split_row(path: &Path, row: usize, line: &str) -> Result<(VertexRef, VertexRef)> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let context = |e| {
        Error::invalid(format!(
            "{} row {}: {e}",
            path.display(),
            row + 2 // 1-based, after the header
        ))
    };
    let (left, right) = line
        .split_once(',')
        .ok_or_else(|| context(Error::invalid("expected two comma-separated refs")))?;
    Ok((
        VertexRef::parse(left).map_err(context)?,
        VertexRef::parse(right).map_err(context)?,
    ))
}
