//! Spectral clustering: embed vertices with the bottom-`k` Laplacian
//! eigenvectors, then run k-means on the rows.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::linalg::SymmetricSpectrum;

/// Lloyd iteration cap.
pub const MAX_KMEANS_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("k = {k} is out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("label vectors have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("label {label} at position {index} is not below k = {k}")]
    LabelOutOfRange { index: usize, label: usize, k: usize },
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
}

/// Labels in `0..k`, every label used at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self, ClusterError> {
        let mut used = vec![false; k];
        for (index, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(ClusterError::LabelOutOfRange { index, label, k });
            }
            used[label] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(ClusterError::EmptyCluster(missing));
        }
        Ok(Self { labels, k })
    }

    /// Relabels arbitrary ids to `0..k` in order of first appearance.
    pub fn from_raw(raw: &[usize]) -> Self {
        let mut ids = BTreeMap::new();
        let labels = raw
            .iter()
            .map(|r| {
                let next = ids.len();
                *ids.entry(*r).or_insert(next)
            })
            .collect();
        Self { labels, k: ids.len() }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// `n x k` matrix whose columns are the eigenvectors of the `k` smallest
/// eigenvalues of `L` (or of the normalized Laplacian), ascending. Each
/// column is signed so its first entry above `1e-10` in magnitude is positive.
pub fn spectral_embedding(g: &WeightedGraph, k: usize, normalized: bool) -> Result<DMatrix<f64>, ClusterError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    let l = if normalized {
        g.normalized_laplacian()
    } else {
        g.laplacian()
    };
    let spec = SymmetricSpectrum::of(l.matrix());
    let mut out = DMatrix::zeros(n, k);
    for c in 0..k {
        let mut v = spec.column(c);
        if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-10) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
        out.set_column(c, &v);
    }
    Ok(out)
}

fn sq_dist(points: &DMatrix<f64>, row: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|d| {
            let diff = points[(row, d)] - centroids[(c, d)];
            diff * diff
        })
        .sum()
}

/// k-means run with its per-iteration objective.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    pub assignment: ClusterAssignment,
    pub centroids: DMatrix<f64>,
    /// Sum of squared distances after every centroid update.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

/// Lloyd's algorithm on the rows of `points` from k-means++ seeding. Stops at
/// an assignment fixpoint or after [`MAX_KMEANS_ITERATIONS`]. Ties go to the
/// lowest cluster index. A cluster left empty takes the point farthest from
/// its centroid (drawn from a cluster with at least two members).
pub fn kmeans_with_trace(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<KMeansOutcome, ClusterError> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    let dim = points.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut best = vec![f64::INFINITY; n];
    while chosen.len() < k {
        let last = *chosen.last().expect("one centre chosen");
        for (i, b) in best.iter_mut().enumerate() {
            let d: f64 = (0..dim)
                .map(|d| {
                    let diff = points[(i, d)] - points[(last, d)];
                    diff * diff
                })
                .sum();
            *b = b.min(d);
        }
        let next = match WeightedIndex::new(&best) {
            Ok(dist) => dist.sample(&mut rng),
            // All remaining mass is zero: duplicates only, pick any unused row.
            Err(_) => {
                let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                free[rng.random_range(0..free.len())]
            }
        };
        chosen.push(next);
    }
    let mut centroids = DMatrix::zeros(k, dim);
    for (c, &row) in chosen.iter().enumerate() {
        centroids.set_row(c, &points.row(row));
    }

    let mut labels = vec![usize::MAX; n];
    let mut objective_history = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_KMEANS_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best_c = 0;
            let mut best_d = sq_dist(points, i, &centroids, 0);
            for c in 1..k {
                let d = sq_dist(points, i, &centroids, c);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if *label != best_c {
                *label = best_c;
                changed = true;
            }
        }
        changed |= repair_empty(points, &centroids, &mut labels, k);
        update_centroids(points, &labels, &mut centroids);
        objective_history.push(objective(points, &labels, &centroids));
        if !changed {
            break;
        }
    }
    let assignment = ClusterAssignment::new(labels, k).expect("repair keeps every cluster populated");
    Ok(KMeansOutcome {
        assignment,
        centroids,
        objective_history,
        iterations,
    })
}

/// [`kmeans_with_trace`] without the trace.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<ClusterAssignment, ClusterError> {
    Ok(kmeans_with_trace(points, k, seed)?.assignment)
}

fn repair_empty(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize], k: usize) -> bool {
    let mut repaired = false;
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return repaired;
        };
        let mut donor: Option<(usize, f64)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let d = sq_dist(points, i, centroids, l);
            if donor.is_none_or(|(_, bd)| d > bd) {
                donor = Some((i, d));
            }
        }
        let (i, _) = donor.expect("n >= k leaves a cluster with two members");
        labels[i] = empty;
        repaired = true;
    }
}

fn update_centroids(points: &DMatrix<f64>, labels: &[usize], centroids: &mut DMatrix<f64>) {
    let k = centroids.nrows();
    let mut sums = DMatrix::<f64>::zeros(k, points.ncols());
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for d in 0..points.ncols() {
            sums[(l, d)] += points[(i, d)];
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            for d in 0..points.ncols() {
                centroids[(c, d)] = sums[(c, d)] / counts[c] as f64;
            }
        }
    }
}

/// Sum of squared distances from each row to its centroid.
pub fn objective(points: &DMatrix<f64>, labels: &[usize], centroids: &DMatrix<f64>) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(points, i, centroids, l))
        .sum()
}

/// `kmeans(spectral_embedding(g, k, normalized), k, seed)`.
pub fn spectral_clustering(
    g: &WeightedGraph,
    k: usize,
    seed: u64,
    normalized: bool,
) -> Result<ClusterAssignment, ClusterError> {
    kmeans(&spectral_embedding(g, k, normalized)?, k, seed)
}

/// Total weight of edges whose endpoints carry different labels.
pub fn multicut_weight(g: &WeightedGraph, a: &ClusterAssignment) -> Result<f64, ClusterError> {
    if a.len() != g.n() {
        return Err(ClusterError::LengthMismatch {
            left: g.n(),
            right: a.len(),
        });
    }
    Ok(g.edges()
        .filter(|(e, _)| a.labels[e.lo()] != a.labels[e.hi()])
        .map(|(_, w)| w)
        .sum())
}

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index from the pair-counting contingency table.
pub fn adjusted_rand_index(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<f64, ClusterError> {
    if a.len() != b.len() {
        return Err(ClusterError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len() as u64;
    let mut table: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut rows = vec![0u64; a.k];
    let mut cols = vec![0u64; b.k];
    for (&x, &y) in a.labels.iter().zip(&b.labels) {
        *table.entry((x, y)).or_insert(0) += 1;
        rows[x] += 1;
        cols[y] += 1;
    }
    let index: f64 = table.values().map(|&c| choose2(c)).sum();
    let sum_rows: f64 = rows.iter().map(|&c| choose2(c)).sum();
    let sum_cols: f64 = cols.iter().map(|&c| choose2(c)).sum();
    let total = choose2(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom == 0.0 {
        // Only reachable when both partitions are all-singletons or a single
        // block, i.e. identical.
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> WeightedGraph {
        WeightedGraph::from_edges(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn assignment_validation() {
        assert!(ClusterAssignment::new(vec![0, 1, 1], 2).is_ok());
        assert_eq!(
            ClusterAssignment::new(vec![0, 0], 2),
            Err(ClusterError::EmptyCluster(1))
        );
        assert!(matches!(
            ClusterAssignment::new(vec![0, 2], 2),
            Err(ClusterError::LabelOutOfRange { index: 1, .. })
        ));
        let raw = ClusterAssignment::from_raw(&[7, 7, 3, 9]);
        assert_eq!(raw.labels(), &[0, 0, 1, 2]);
        assert_eq!(raw.k(), 3);
    }

    #[test]
    fn embedding_k1_is_constant() {
        let g = two_triangles();
        let tri = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let e = spectral_embedding(&tri, 1, false).unwrap();
        let expected = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            assert!((e[(i, 0)] - expected).abs() < 1e-12);
        }
        assert!(spectral_embedding(&g, 0, false).is_err());
        assert!(spectral_embedding(&g, 7, false).is_err());
    }

    #[test]
    fn embedding_two_components() {
        let e = spectral_embedding(&two_triangles(), 2, false).unwrap();
        // Rows inside a triangle coincide; rows across differ.
        for c in 0..2 {
            assert!((e[(0, c)] - e[(1, c)]).abs() < 1e-9);
            assert!((e[(3, c)] - e[(5, c)]).abs() < 1e-9);
        }
        let gap: f64 = (0..2).map(|c| (e[(0, c)] - e[(3, c)]).powi(2)).sum();
        assert!(gap > 0.1);
    }

    #[test]
    fn kmeans_trivial_cases() {
        let pts = DMatrix::from_row_slice(4, 1, &[0.0, 1.0, 5.0, 9.0]);
        let a = kmeans(&pts, 4, 3).unwrap();
        let mut seen = a.labels().to_vec();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);

        let same = DMatrix::from_element(5, 2, 1.0);
        let out = kmeans_with_trace(&same, 2, 0).unwrap();
        assert_eq!(out.assignment.k(), 2);
        assert!(out.iterations <= MAX_KMEANS_ITERATIONS);

        assert!(matches!(kmeans(&pts, 5, 0), Err(ClusterError::KOutOfRange { .. })));
    }

    #[test]
    fn kmeans_separates_clouds() {
        let mut data = Vec::new();
        for i in 0..10 {
            let j = i as f64 * 0.01;
            data.extend_from_slice(&[j, -j]);
        }
        for i in 0..10 {
            let j = i as f64 * 0.01;
            data.extend_from_slice(&[100.0 + j, 100.0 - j]);
        }
        let pts = DMatrix::from_row_slice(20, 2, &data);
        for seed in 0..20 {
            let a = kmeans(&pts, 2, seed).unwrap();
            let l = a.labels();
            assert!(l[..10].iter().all(|&x| x == l[0]));
            assert!(l[10..].iter().all(|&x| x == l[10]));
            assert_ne!(l[0], l[10]);
        }
    }

    #[test]
    fn spectral_clustering_cases() {
        let g = two_triangles();
        for seed in 0..10 {
            let a = spectral_clustering(&g, 2, seed, false).unwrap();
            let l = a.labels();
            assert!(l[0] == l[1] && l[1] == l[2]);
            assert!(l[3] == l[4] && l[4] == l[5]);
            assert_ne!(l[0], l[3]);
            assert_eq!(multicut_weight(&g, &a).unwrap(), 0.0);
        }
        let one = spectral_clustering(&g, 1, 0, true).unwrap();
        assert!(one.labels().iter().all(|&x| x == 0));
    }

    #[test]
    fn multicut_cases() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 3.0)]).unwrap();
        let together = ClusterAssignment::new(vec![0, 0], 1).unwrap();
        let apart = ClusterAssignment::new(vec![0, 1], 2).unwrap();
        assert_eq!(multicut_weight(&g, &together).unwrap(), 0.0);
        assert_eq!(multicut_weight(&g, &apart).unwrap(), 3.0);
        let short = ClusterAssignment::new(vec![0], 1).unwrap();
        assert!(multicut_weight(&g, &short).is_err());
    }

    #[test]
    fn ari_identity_and_relabeling() {
        let a = ClusterAssignment::new(vec![0, 0, 1, 1, 2], 3).unwrap();
        let b = ClusterAssignment::new(vec![2, 2, 0, 0, 1], 3).unwrap();
        assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 1.0);
        let short = ClusterAssignment::new(vec![0], 1).unwrap();
        assert!(adjusted_rand_index(&a, &short).is_err());
    }
}
