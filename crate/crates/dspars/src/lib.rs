//! Std front end for `dspars-core`: edge-list and family files, label
//! files, JSON reports and the `dspars` command line.

pub mod cli;
pub mod edge_list;
pub mod error;
pub mod family;
pub mod labels;

pub use edge_list::{format_edge_list, load_graph, parse_edge_list, save_graph};
pub use error::Error;
pub use family::{load_family, save_family, FamilyDocument};
pub use labels::{labels_json, load_labels, parse_labels};
