//! JSON family files.
//!
//! `{ "graph": "<path>", "sets": [[[u, v], ...], ...] }`. A relative graph
//! path is resolved against the directory holding the family file.

use std::fs;
use std::path::{Path, PathBuf};

use dspars_core::{EdgeFamily, VertexId};
use serde::{Deserialize, Serialize};

use crate::edge_list::load_graph;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub graph: PathBuf,
    pub sets: Vec<Vec<(VertexId, VertexId)>>,
}

impl FamilyDocument {
    /// Document for `family`, pointing at `graph` for the base graph.
    pub fn describe(graph: impl Into<PathBuf>, family: &EdgeFamily) -> Self {
        Self {
            graph: graph.into(),
            sets: family
                .sets()
                .sets()
                .iter()
                .map(|s| s.iter().map(|e| e.endpoints()).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("family documents always serialize");
        text.push('\n');
        text
    }
}

/// Graph path of `doc` as seen from the current directory.
pub fn resolve_graph_path(family_path: &Path, doc: &FamilyDocument) -> PathBuf {
    if doc.graph.is_absolute() {
        doc.graph.clone()
    } else {
        family_path
            .parent()
            .map_or_else(|| doc.graph.clone(), |dir| dir.join(&doc.graph))
    }
}

pub fn read_family_document(path: &Path) -> Result<FamilyDocument, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a family file and the base graph it names.
pub fn load_family(path: &Path) -> Result<EdgeFamily, Error> {
    let doc = read_family_document(path)?;
    let base = load_graph(&resolve_graph_path(path, &doc))?;
    Ok(EdgeFamily::from_pairs(base, &doc.sets)?)
}

pub fn save_family(path: &Path, doc: &FamilyDocument) -> Result<(), Error> {
    fs::write(path, doc.to_json()).map_err(|e| Error::io(path, e))
}
