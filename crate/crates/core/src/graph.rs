//! Weighted undirected graphs and their Laplacians.
//!
//! A [`WeightedGraph`] is immutable once built. Edges are identified by the
//! unordered vertex pair ([`EdgeKey`]), never by weight, so edge families and
//! protocol transcripts can refer to edges of different graphs over the same
//! vertex set.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { u: VertexId, v: VertexId, weight: f64 },
    #[error("edge ({u}, {v}) is not in the graph")]
    MissingEdge { u: VertexId, v: VertexId },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Unordered vertex pair, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(into = "(VertexId, VertexId)", try_from = "(VertexId, VertexId)")
)]
pub struct EdgeKey {
    lo: VertexId,
    hi: VertexId,
}

impl EdgeKey {
    /// Builds the key for `{a, b}`. Fails on a self-loop.
    pub fn new(a: VertexId, b: VertexId) -> Result<Self, GraphError> {
        match a.cmp(&b) {
            core::cmp::Ordering::Less => Ok(Self { lo: a, hi: b }),
            core::cmp::Ordering::Greater => Ok(Self { lo: b, hi: a }),
            core::cmp::Ordering::Equal => Err(GraphError::SelfLoop(a)),
        }
    }

    pub fn lo(&self) -> VertexId {
        self.lo
    }

    pub fn hi(&self) -> VertexId {
        self.hi
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.lo, self.hi)
    }

    /// Applies a vertex relabeling.
    pub fn relabel(&self, perm: &[VertexId]) -> Self {
        let (a, b) = (perm[self.lo], perm[self.hi]);
        if a < b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }
}

impl From<EdgeKey> for (VertexId, VertexId) {
    fn from(e: EdgeKey) -> Self {
        e.endpoints()
    }
}

impl TryFrom<(VertexId, VertexId)> for EdgeKey {
    type Error = GraphError;

    fn try_from((a, b): (VertexId, VertexId)) -> Result<Self, Self::Error> {
        Self::new(a, b)
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// `G = (V, E, w)` with `V = {0, .., n-1}` and strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: BTreeMap<EdgeKey, f64>,
}

impl WeightedGraph {
    /// Graph on `n` vertices with no edges.
    pub fn edgeless(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        Ok(Self {
            n,
            edges: BTreeMap::new(),
        })
    }

    /// Builds a graph from `(u, v, w)` triples, rejecting self-loops,
    /// duplicate pairs, out-of-range vertices and weights that are not
    /// strictly positive and finite.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        let mut g = Self::edgeless(n)?;
        for (u, v, w) in edges {
            g.insert(u, v, w)?;
        }
        Ok(g)
    }

    /// Same as [`from_edges`](Self::from_edges) but keyed by [`EdgeKey`].
    pub fn from_keyed<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (EdgeKey, f64)>,
    {
        Self::from_edges(n, edges.into_iter().map(|(e, w)| (e.lo, e.hi, w)))
    }

    fn insert(&mut self, u: VertexId, v: VertexId, w: f64) -> Result<(), GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        let key = EdgeKey::new(u, v)?;
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::InvalidWeight { u, v, weight: w });
        }
        if self.edges.insert(key, w).is_some() {
            return Err(GraphError::DuplicateEdge { u: key.lo, v: key.hi });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, e: EdgeKey) -> Option<f64> {
        self.edges.get(&e).copied()
    }

    pub fn contains(&self, e: EdgeKey) -> bool {
        self.edges.contains_key(&e)
    }

    /// Edges in ascending `(lo, hi)` order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeKey, f64)> + '_ {
        self.edges.iter().map(|(e, w)| (*e, *w))
    }

    pub fn edge_keys(&self) -> impl ExactSizeIterator<Item = EdgeKey> + '_ {
        self.edges.keys().copied()
    }

    /// Weighted degrees `d(u) = sum of w(u, v)`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (e, w) in self.edges() {
            d[e.lo] += w;
            d[e.hi] += w;
        }
        d
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Every weight multiplied by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self, GraphError> {
        Self::from_keyed(self.n, self.edges().map(|(e, w)| (e, alpha * w)))
    }

    /// Vertex `v` becomes `perm[v]`. `perm` must be a permutation of `0..n`.
    pub fn relabeled(&self, perm: &[VertexId]) -> Result<Self, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        Self::from_keyed(self.n, self.edges().map(|(e, w)| (e.relabel(perm), w)))
    }

    /// `G_S = (V, S, w|_S)`: same vertex set, exactly the edges in `S`.
    pub fn induced_subgraph<I>(&self, subset: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = EdgeKey>,
    {
        let mut out = Self::edgeless(self.n)?;
        for e in subset {
            let w = self.weight(e).ok_or(GraphError::MissingEdge { u: e.lo, v: e.hi })?;
            out.insert(e.lo, e.hi, w)?;
        }
        Ok(out)
    }

    /// `L = D - W`.
    pub fn laplacian(&self) -> Laplacian {
        let mut m = DMatrix::<f64>::zeros(self.n, self.n);
        for (e, w) in self.edges() {
            let (u, v) = e.endpoints();
            m[(u, v)] -= w;
            m[(v, u)] -= w;
            m[(u, u)] += w;
            m[(v, v)] += w;
        }
        Laplacian {
            matrix: m,
            normalized: false,
        }
    }

    /// `D^{-1/2} L D^{-1/2}`. Rows and columns of isolated vertices are zero.
    pub fn normalized_laplacian(&self) -> Laplacian {
        let d = self.degrees();
        let inv_sqrt: Vec<f64> = d
            .iter()
            .map(|&x| if x > 0.0 { 1.0 / libm::sqrt(x) } else { 0.0 })
            .collect();
        let mut m = self.laplacian().matrix;
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
            }
        }
        Laplacian {
            matrix: m,
            normalized: true,
        }
    }

    /// Maximal connected vertex sets, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.edge_keys() {
            let (a, b) = (find(&mut parent, e.lo), find(&mut parent, e.hi));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for v in 0..self.n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }
}

/// Dense `n x n` Laplacian, plain or normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    matrix: DMatrix<f64>,
    normalized: bool,
}

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `x^T L x`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64, GraphError> {
        let n = self.dim();
        if x.len() != n {
            return Err(GraphError::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        Ok(x.iter()
            .enumerate()
            .map(|(i, xi)| xi * self.matrix.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .sum())
    }
}
