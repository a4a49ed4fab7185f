//! Plain-text weighted edge lists.
//!
//! One edge per line as `u v w`, whitespace separated. Blank lines and lines
//! starting with `#` are skipped. An optional first data line `n <count>`
//! fixes the vertex count; otherwise it is one more than the largest id.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dspars_core::{EdgeKey, GraphError, WeightedGraph};

use crate::error::Error;

/// Parses an edge list. `origin` only labels error messages.
pub fn parse_edge_list(text: &str, origin: &Path) -> Result<WeightedGraph, Error> {
    let fail = |line: usize, message: String| Error::EdgeList {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut declared: Option<usize> = None;
    let mut seen_data = false;
    let mut edges: Vec<(usize, usize, f64, usize)> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "n" {
            if seen_data {
                return Err(fail(line_no, "`n <count>` must be the first data line".into()));
            }
            if fields.len() != 2 {
                return Err(fail(line_no, "expected `n <count>`".into()));
            }
            let n = fields[1]
                .parse()
                .map_err(|e| fail(line_no, format!("bad vertex count {:?}: {e}", fields[1])))?;
            declared = Some(n);
            seen_data = true;
            continue;
        }
        seen_data = true;
        if fields.len() != 3 {
            return Err(fail(
                line_no,
                format!("expected `u v w`, found {} fields", fields.len()),
            ));
        }
        let u = fields[0]
            .parse()
            .map_err(|e| fail(line_no, format!("bad vertex id {:?}: {e}", fields[0])))?;
        let v = fields[1]
            .parse()
            .map_err(|e| fail(line_no, format!("bad vertex id {:?}: {e}", fields[1])))?;
        let w = fields[2]
            .parse()
            .map_err(|e| fail(line_no, format!("bad weight {:?}: {e}", fields[2])))?;
        edges.push((u, v, w, line_no));
    }

    let n = match declared {
        Some(n) => n,
        None => edges
            .iter()
            .map(|&(u, v, _, _)| u.max(v) + 1)
            .max()
            .ok_or_else(|| fail(0, "no edges and no `n <count>` line".into()))?,
    };
    if n == 0 {
        return Err(fail(0, GraphError::NoVertices.to_string()));
    }
    let mut keys = BTreeSet::new();
    for &(u, v, w, line_no) in &edges {
        let key = EdgeKey::new(u, v).map_err(|e| fail(line_no, e.to_string()))?;
        if key.hi() >= n {
            let err = GraphError::VertexOutOfRange { vertex: key.hi(), n };
            return Err(fail(line_no, err.to_string()));
        }
        if !(w.is_finite() && w > 0.0) {
            let err = GraphError::InvalidWeight { u, v, weight: w };
            return Err(fail(line_no, err.to_string()));
        }
        if !keys.insert(key) {
            let err = GraphError::DuplicateEdge { u, v };
            return Err(fail(line_no, err.to_string()));
        }
    }
    WeightedGraph::from_edges(n, edges.into_iter().map(|(u, v, w, _)| (u, v, w))).map_err(|e| fail(0, e.to_string()))
}

/// Reads and parses an edge-list file.
pub fn load_graph(path: &Path) -> Result<WeightedGraph, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

/// Canonical text form: an `n` line, then edges in `(lo, hi)` order with
/// weights in shortest round-trip notation.
pub fn format_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", g.n()).expect("writing to a String");
    for (e, w) in g.edges() {
        writeln!(out, "{} {} {}", e.lo(), e.hi(), w).expect("writing to a String");
    }
    out
}

pub fn save_graph(path: &Path, g: &WeightedGraph) -> Result<(), Error> {
    fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}
