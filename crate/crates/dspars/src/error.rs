use std::io;
use std::path::PathBuf;

use dspars_core::{ClusterError, FamilyError, GraphError, NofError, SparsifyError};

/// Every failure the front end can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    EdgeList {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Labels { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error(transparent)]
    Nof(#[from] NofError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

impl Error {
    /// Stable machine-readable tag for the `"error"` field.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::EdgeList { .. } => "edge_list",
            Error::Json { .. } => "json",
            Error::Labels { .. } => "labels",
            Error::Usage(_) => "usage",
            Error::Graph(_) => "graph",
            Error::Family(_) => "family",
            Error::Sparsify(_) => "sparsify",
            Error::Nof(_) => "nof",
            Error::Cluster(_) => "cluster",
        }
    }

    /// Process exit status: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
