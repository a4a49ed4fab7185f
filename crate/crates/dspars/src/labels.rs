//! Cluster label files: a JSON array of non-negative integers, one per
//! vertex. An object carrying such an array under `"labels"` is accepted
//! too.

use std::fs;
use std::path::Path;

use dspars_core::ClusterAssignment;
use serde::Deserialize;

use crate::error::Error;

#[derive(Deserialize)]
#[serde(untagged)]
enum LabelDocument {
    Bare(Vec<usize>),
    Wrapped { labels: Vec<usize> },
}

pub fn labels_json(a: &ClusterAssignment) -> String {
    let mut text = serde_json::to_string(a.labels()).expect("labels always serialize");
    text.push('\n');
    text
}

pub fn parse_labels(text: &str, origin: &Path) -> Result<ClusterAssignment, Error> {
    let doc: LabelDocument = serde_json::from_str(text).map_err(|_| Error::Labels {
        path: origin.to_path_buf(),
        message: "expected a JSON array of non-negative integers".into(),
    })?;
    let raw = match doc {
        LabelDocument::Bare(v) | LabelDocument::Wrapped { labels: v } => v,
    };
    if raw.is_empty() {
        return Err(Error::Labels {
            path: origin.to_path_buf(),
            message: "no labels".into(),
        });
    }
    Ok(ClusterAssignment::from_raw(&raw))
}

pub fn load_labels(path: &Path) -> Result<ClusterAssignment, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, path)
}
