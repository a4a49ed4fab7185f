//! Occurrence numbers, overlapping cardinality and the overlapping
//! cardinality partition of a set family.
//!
//! The set calculus is generic over the element type so it works on plain
//! integers as well as on [`EdgeKey`]s. [`EdgeFamily`] ties a family of edge
//! sets to the graph whose edge set they cover; that is the shape the
//! sparsifier union and the NOF protocols consume.
//!
//! The central identity is that summing the Laplacians of the per-set
//! induced subgraphs equals the cardinality-weighted sum of the Laplacians
//! induced by the partition classes:
//!
//! ```text
//! sum_i L(G_i) = sum_j c_j * L(G'_{c_j})
//! ```
//!
//! [`EdgeFamily::combined_laplacian_residual`] evaluates both sides.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{EdgeKey, GraphError, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("a family needs at least one set")]
    NoSets,
    #[error("set {index} is empty")]
    EmptySet { index: usize },
    #[error("set {index} contains edge {edge} which is not in the base graph")]
    EdgeNotInBase { index: usize, edge: EdgeKey },
    #[error("edge {0} of the base graph is not covered by any set")]
    Uncovered(EdgeKey),
    #[error("overlapping cardinality of the empty set is undefined")]
    EmptySubset,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Ordered list of finite sets `E_1, .., E_t`. Repeated sets are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily<T: Ord> {
    sets: Vec<BTreeSet<T>>,
}

impl<T: Ord + Clone> SetFamily<T> {
    pub fn new(sets: Vec<BTreeSet<T>>) -> Self {
        Self { sets }
    }

    pub fn from_slices<S: AsRef<[T]>>(sets: &[S]) -> Self {
        Self::new(sets.iter().map(|s| s.as_ref().iter().cloned().collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[BTreeSet<T>] {
        &self.sets
    }

    /// `E_i`, 0-based.
    pub fn set(&self, index: usize) -> Option<&BTreeSet<T>> {
        self.sets.get(index)
    }

    pub fn union(&self) -> BTreeSet<T> {
        self.sets.iter().flat_map(|s| s.iter().cloned()).collect()
    }

    /// Intersection of all sets; empty for an empty family.
    pub fn intersection(&self) -> BTreeSet<T> {
        intersect_all(self.sets.iter())
    }

    /// `#(a)`: the number of sets that contain `a`.
    pub fn occurrence_number(&self, a: &T) -> usize {
        self.sets.iter().filter(|s| s.contains(a)).count()
    }

    /// Occurrence numbers of every element of the union.
    pub fn occurrence_numbers(&self) -> BTreeMap<T, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.sets {
            for a in s {
                *counts.entry(a.clone()).or_insert(0) += 1;
            }
        }
        counts
    }

    /// `k` when every element of `subset` has occurrence number `k`,
    /// otherwise 0.
    pub fn overlapping_cardinality<'a, I>(&self, subset: I) -> Result<usize, FamilyError>
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        let mut iter = subset.into_iter();
        let first = iter.next().ok_or(FamilyError::EmptySubset)?;
        let k = self.occurrence_number(first);
        for a in iter {
            if self.occurrence_number(a) != k {
                return Ok(0);
            }
        }
        Ok(k)
    }

    /// Groups the union by occurrence number, classes in increasing
    /// cardinality.
    pub fn overlap_partition(&self) -> OverlapPartition<T> {
        let mut by_count: BTreeMap<usize, BTreeSet<T>> = BTreeMap::new();
        for (a, c) in self.occurrence_numbers() {
            by_count.entry(c).or_default().insert(a);
        }
        OverlapPartition {
            classes: by_count
                .into_iter()
                .map(|(cardinality, members)| OverlapClass { cardinality, members })
                .collect(),
        }
    }
}

pub(crate) fn intersect_all<'a, T, I>(mut sets: I) -> BTreeSet<T>
where
    T: Ord + Clone + 'a,
    I: Iterator<Item = &'a BTreeSet<T>>,
{
    let Some(first) = sets.next() else {
        return BTreeSet::new();
    };
    let mut acc = first.clone();
    for s in sets {
        acc.retain(|a| s.contains(a));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// One class `E'_c` of an overlap partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapClass<T: Ord> {
    pub cardinality: usize,
    pub members: BTreeSet<T>,
}

/// Partition of the union of a family into classes of equal occurrence
/// number. Cardinalities are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapPartition<T: Ord> {
    classes: Vec<OverlapClass<T>>,
}

impl<T: Ord> OverlapPartition<T> {
    pub fn classes(&self) -> &[OverlapClass<T>] {
        &self.classes
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.cardinality).collect()
    }

    /// Smallest cardinality `c_1`; 0 for an empty partition.
    pub fn c1(&self) -> usize {
        self.classes.first().map_or(0, |c| c.cardinality)
    }

    /// Largest cardinality `c_k`; 0 for an empty partition.
    pub fn ck(&self) -> usize {
        self.classes.last().map_or(0, |c| c.cardinality)
    }
}

/// Edge sets `E_1, .., E_t` over a base graph, each non-empty, all inside
/// `E(base)`, jointly covering it.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFamily {
    base: WeightedGraph,
    sets: SetFamily<EdgeKey>,
}

impl EdgeFamily {
    pub fn new(base: WeightedGraph, sets: Vec<BTreeSet<EdgeKey>>) -> Result<Self, FamilyError> {
        if sets.is_empty() {
            return Err(FamilyError::NoSets);
        }
        for (index, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(FamilyError::EmptySet { index });
            }
            if let Some(edge) = s.iter().find(|e| !base.contains(**e)) {
                return Err(FamilyError::EdgeNotInBase { index, edge: *edge });
            }
        }
        let sets = SetFamily::new(sets);
        let covered = sets.union();
        if let Some(e) = base.edge_keys().find(|e| !covered.contains(e)) {
            return Err(FamilyError::Uncovered(e));
        }
        Ok(Self { base, sets })
    }

    /// Convenience constructor from vertex pairs.
    pub fn from_pairs(base: WeightedGraph, sets: &[Vec<(usize, usize)>]) -> Result<Self, FamilyError> {
        let keyed = sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&(u, v)| EdgeKey::new(u, v))
                    .collect::<Result<BTreeSet<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(base, keyed)
    }

    pub fn base(&self) -> &WeightedGraph {
        &self.base
    }

    pub fn sets(&self) -> &SetFamily<EdgeKey> {
        &self.sets
    }

    /// Number of sets `t` (the number of sites `s` in the NOF setting).
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn occurrence_number(&self, e: EdgeKey) -> usize {
        self.sets.occurrence_number(&e)
    }

    pub fn overlapping_cardinality<'a, I>(&self, subset: I) -> Result<usize, FamilyError>
    where
        I: IntoIterator<Item = &'a EdgeKey>,
    {
        self.sets.overlapping_cardinality(subset)
    }

    pub fn overlap_partition(&self) -> OverlapPartition<EdgeKey> {
        self.sets.overlap_partition()
    }

    /// `G_i = (V, E_i, w|_{E_i})`, 0-based.
    pub fn part(&self, index: usize) -> Option<WeightedGraph> {
        let s = self.sets.set(index)?;
        Some(
            self.base
                .induced_subgraph(s.iter().copied())
                .expect("family sets are subsets of the base graph"),
        )
    }

    pub fn parts(&self) -> Vec<WeightedGraph> {
        (0..self.len()).filter_map(|i| self.part(i)).collect()
    }

    /// Largest absolute entry of `sum_i L(G_i) - sum_j c_j L(G'_{c_j})`.
    pub fn combined_laplacian_residual(&self) -> f64 {
        let n = self.base.n();
        let mut lhs = nalgebra::DMatrix::<f64>::zeros(n, n);
        for g in self.parts() {
            lhs += g.laplacian().matrix();
        }
        let mut rhs = nalgebra::DMatrix::<f64>::zeros(n, n);
        for class in self.overlap_partition().classes() {
            let g = self
                .base
                .induced_subgraph(class.members.iter().copied())
                .expect("partition classes are subsets of the base graph");
            rhs += g.laplacian().matrix() * class.cardinality as f64;
        }
        (lhs - rhs).abs().max()
    }
}
