//! Distributed spectral sparsification of weighted graphs.
//!
//! * [`graph`]: weighted graphs, Laplacians, quadratic forms.
//! * [`overlap`]: occurrence numbers and the overlapping cardinality
//!   partition of an edge family.
//! * [`sparsifier`]: effective-resistance sparsifiers, exact ε verification
//!   and the reweighted union of per-site sparsifiers.
//! * [`sunflower`] and [`nof`]: Δ-systems and a Number-On-Forehead
//!   blackboard simulator for sunflower-allocated edge sets.
//! * [`clustering`]: spectral clustering on a graph or its sparsifier.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod clustering;
pub mod generate;
pub mod graph;
pub mod linalg;
pub mod nof;
pub mod overlap;
pub mod sparsifier;
pub mod sunflower;

pub use clustering::{
    adjusted_rand_index, kmeans, multicut_weight, spectral_clustering, spectral_embedding, ClusterAssignment,
    ClusterError,
};
pub use graph::{EdgeKey, GraphError, Laplacian, VertexId, WeightedGraph};
pub use nof::{
    protocol_broadcast_graph, protocol_sparsifier_exchange, protocol_verify_sunflower, NofError, Transcript,
};
pub use overlap::{EdgeFamily, FamilyError, OverlapPartition, SetFamily};
pub use sparsifier::{
    effective_resistances, epsilon_prime, sparsify_er, union_sparsifiers, verify_epsilon, ErSampler, SparsifierResult,
    SparsifyError, UnionSparsifier,
};
pub use sunflower::{deza_threshold, is_delta_system, DeltaSystemReport};
