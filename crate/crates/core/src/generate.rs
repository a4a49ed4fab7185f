//! Seeded instance generators: test graphs, covering families and
//! sunflower allocations.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{EdgeKey, GraphError, WeightedGraph};
use crate::overlap::{EdgeFamily, FamilyError};
use crate::sunflower::deza_threshold;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("{m} edges cannot be split into a kernel of {kernel} plus petals of {petal}")]
    IndivisibleSunflower { m: usize, kernel: usize, petal: usize },
    #[error("no sunflower allocation of {m} edges meets the site threshold")]
    NoFeasibleSunflower { m: usize },
    #[error("a graph on {n} vertices has at most {max} edges, {requested} requested")]
    TooManyEdges { n: usize, max: usize, requested: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `K_n` with unit weights.
pub fn complete_graph(n: usize) -> Result<WeightedGraph, GraphError> {
    WeightedGraph::from_edges(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v, 1.0))))
}

/// Stochastic block model: consecutive blocks of the given sizes, unit
/// weights, edge probability `p_in` inside a block and `p_out` across.
pub fn planted_partition<R: Rng>(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Result<(WeightedGraph, Vec<usize>), GraphError> {
    let labels: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| core::iter::repeat_n(b, size))
        .collect();
    let n = labels.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    Ok((WeightedGraph::from_edges(n, edges)?, labels))
}

/// Erdős–Rényi `G(n, p)` with weights uniform in `[w_lo, w_hi)`.
pub fn random_graph<R: Rng>(
    n: usize,
    p: f64,
    (w_lo, w_hi): (f64, f64),
    rng: &mut R,
) -> Result<WeightedGraph, GraphError> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, rng.random_range(w_lo..w_hi)));
            }
        }
    }
    WeightedGraph::from_edges(n, edges)
}

/// Uniformly random graph with exactly `m` edges.
pub fn random_graph_with_edges<R: Rng>(
    n: usize,
    m: usize,
    (w_lo, w_hi): (f64, f64),
    rng: &mut R,
) -> Result<WeightedGraph, GenerateError> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(GenerateError::TooManyEdges { n, max, requested: m });
    }
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    pairs.truncate(m);
    pairs.sort_unstable();
    Ok(WeightedGraph::from_edges(
        n,
        pairs.into_iter().map(|(u, v)| (u, v, rng.random_range(w_lo..w_hi))),
    )?)
}

/// `t` non-empty random subsets jointly covering `E(g)`. Every edge lands in
/// one uniformly chosen set and then joins each other set with probability
/// `extra`. Requires `1 <= t <= m`.
pub fn random_covering_family<R: Rng>(
    g: &WeightedGraph,
    t: usize,
    extra: f64,
    rng: &mut R,
) -> Result<EdgeFamily, FamilyError> {
    let mut edges: Vec<EdgeKey> = g.edge_keys().collect();
    edges.shuffle(rng);
    let mut sets: Vec<BTreeSet<EdgeKey>> = (0..t).map(|_| BTreeSet::new()).collect();
    for (i, e) in edges.iter().enumerate() {
        // The first t shuffled edges seed one set each.
        let home = if i < t { i } else { rng.random_range(0..t) };
        sets[home].insert(*e);
        for (j, s) in sets.iter_mut().enumerate() {
            if j != home && rng.random::<f64>() < extra {
                s.insert(*e);
            }
        }
    }
    EdgeFamily::new(g.clone(), sets)
}

/// Sunflower allocation of `E(g)`: a random kernel of `kernel` edges plus
/// disjoint petals of `petal` edges, one set per petal. With `petal = 0`
/// the result is `copies` identical sets equal to `E(g)`.
pub fn sunflower_allocation<R: Rng>(
    g: &WeightedGraph,
    kernel: usize,
    petal: usize,
    copies: usize,
    rng: &mut R,
) -> Result<EdgeFamily, GenerateError> {
    let m = g.m();
    let mut edges: Vec<EdgeKey> = g.edge_keys().collect();
    edges.shuffle(rng);
    if petal == 0 {
        if kernel != m {
            return Err(GenerateError::IndivisibleSunflower { m, kernel, petal });
        }
        let all: BTreeSet<EdgeKey> = edges.into_iter().collect();
        return Ok(EdgeFamily::new(g.clone(), alloc::vec![all; copies.max(1)])?);
    }
    if kernel > m || !(m - kernel).is_multiple_of(petal) || m == kernel {
        return Err(GenerateError::IndivisibleSunflower { m, kernel, petal });
    }
    let core: BTreeSet<EdgeKey> = edges[..kernel].iter().copied().collect();
    let sets = edges[kernel..]
        .chunks(petal)
        .map(|chunk| core.iter().copied().chain(chunk.iter().copied()).collect())
        .collect();
    Ok(EdgeFamily::new(g.clone(), sets)?)
}

/// Sunflower allocation of all of `E(g)` with one-edge petals and the
/// largest kernel for which `s >= ℓ² - ℓ + 3` still holds.
pub fn covering_sunflower<R: Rng>(g: &WeightedGraph, rng: &mut R) -> Result<EdgeFamily, GenerateError> {
    let m = g.m();
    let feasible = |kernel: usize| kernel < m && m - kernel > deza_threshold(kernel + 1);
    let kernel = (0..m)
        .take_while(|&k| feasible(k))
        .last()
        .ok_or(GenerateError::NoFeasibleSunflower { m })?;
    sunflower_allocation(g, kernel, 1, 0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nof::sunflower_shape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complete_graph_size() {
        assert_eq!(complete_graph(40).unwrap().m(), 780);
    }

    #[test]
    fn covering_family_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_graph(20, 0.3, (0.5, 2.0), &mut rng).unwrap();
        let f = random_covering_family(&g, 5, 0.2, &mut rng).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f.sets().union().len(), g.m());
    }

    #[test]
    fn sunflowers_meet_protocol_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_graph_with_edges(12, 19, (1.0, 2.0), &mut rng).unwrap();
        let star = sunflower_allocation(&g, 1, 2, 0, &mut rng).unwrap();
        let shape = sunflower_shape(star.sets()).unwrap();
        assert_eq!((star.len(), shape.ell, shape.lambda), (9, 3, 1));

        let g = random_graph_with_edges(30, 130, (1.0, 2.0), &mut rng).unwrap();
        let cover = covering_sunflower(&g, &mut rng).unwrap();
        let shape = sunflower_shape(cover.sets()).unwrap();
        assert_eq!(shape.lambda, 10);
        assert_eq!(cover.len(), 120);
    }

    #[test]
    fn indivisible_sunflower_rejected() {
        let g = complete_graph(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sunflower_allocation(&g, 1, 2, 0, &mut rng),
            Err(GenerateError::IndivisibleSunflower { .. })
        ));
    }
}
