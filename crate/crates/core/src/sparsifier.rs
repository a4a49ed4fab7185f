//! Base spectral sparsifiers, exact verification and the union of per-site
//! sparsifiers.
//!
//! `H` is an ε-spectral sparsifier of `G` when for every `x`
//!
//! ```text
//! (1 - ε) x^T L_G x <= x^T L_H x <= (1 + ε) x^T L_G x
//! ```
//!
//! [`verify_epsilon`] returns the smallest such ε by solving the pencil
//! `(L_H, L_G)` on the range of `L_G`. Base sparsifiers come from
//! effective-resistance sampling ([`sparsify_er`]); their quality is never
//! assumed, it is certified by the verifier.
//!
//! [`union_sparsifiers`] combines sparsifiers `H_i` of the induced subgraphs
//! `G_i` of an [`EdgeFamily`] into one graph with weights
//! `h(e) = sum_i h_i(e) / (c_1 c_k)`, where `c_1`, `c_k` are the extreme
//! overlapping cardinalities of the family, and reports the resulting
//! approximation factor from [`epsilon_prime`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeKey, GraphError, WeightedGraph};
use crate::linalg::SymmetricSpectrum;
use crate::overlap::EdgeFamily;

/// Eigenvalues of `L_G` at or below this fraction of the largest are kernel.
pub const KERNEL_REL_TOL: f64 = 1e-10;

/// Default oversampling constant `C` in `q = ceil(C n ln n / ε²)`.
pub const DEFAULT_SAMPLING_CONSTANT: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SparsifyError {
    #[error("epsilon {0} is outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("sampling constant {0} must be positive and finite")]
    InvalidConstant(f64),
    #[error("cannot sparsify a graph without edges")]
    NoEdges,
    #[error("invalid epsilon-prime arguments: epsilon={epsilon}, c1={c1}, ck={ck}")]
    InvalidBoundArguments { epsilon: f64, c1: usize, ck: usize },
    #[error("no parts to combine")]
    NoParts,
    #[error("family has {sets} sets but {parts} parts were given")]
    PartCountMismatch { sets: usize, parts: usize },
    #[error("part {index} lives on {found} vertices, expected {expected}")]
    PartVertexMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("part {index} uses edge {edge} outside its site's edge set")]
    PartOutsideSite { index: usize, edge: EdgeKey },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A sparsifier `H` of some source graph together with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsifierResult {
    pub h: WeightedGraph,
    /// ε the construction aimed for; 0 for exact copies.
    pub epsilon_target: f64,
    /// Exact smallest ε for which `H` sparsifies the source, from
    /// [`verify_epsilon`].
    pub epsilon_certified: f64,
    /// Seed of the sampler, `None` for deterministic constructions.
    pub seed: Option<u64>,
}

impl SparsifierResult {
    /// `H = G`, certified ε = 0.
    pub fn exact(g: &WeightedGraph) -> Self {
        Self {
            h: g.clone(),
            epsilon_target: 0.0,
            epsilon_certified: 0.0,
            seed: None,
        }
    }

    /// Wraps an externally built `h`, certifying it against `source`.
    pub fn certify(
        source: &WeightedGraph,
        h: WeightedGraph,
        epsilon_target: f64,
        seed: Option<u64>,
    ) -> Result<Self, GraphError> {
        let epsilon_certified = verify_epsilon(source, &h)?;
        Ok(Self {
            h,
            epsilon_target,
            epsilon_certified,
            seed,
        })
    }
}

/// `R(u, v) = (e_u - e_v)^T L^+ (e_u - e_v)` for every edge, in edge order.
/// Works per component since the pseudoinverse never mixes components.
pub fn effective_resistances(g: &WeightedGraph) -> Vec<(EdgeKey, f64)> {
    if g.m() == 0 {
        return Vec::new();
    }
    let pinv = SymmetricSpectrum::of(g.laplacian().matrix()).pseudo_inverse(KERNEL_REL_TOL);
    g.edge_keys()
        .map(|e| {
            let (u, v) = e.endpoints();
            (e, pinv[(u, u)] + pinv[(v, v)] - 2.0 * pinv[(u, v)])
        })
        .collect()
}

/// Effective-resistance sampler configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErSampler {
    /// `C` in `q = ceil(C n ln n / ε²)`.
    pub constant: f64,
}

impl Default for ErSampler {
    fn default() -> Self {
        Self {
            constant: DEFAULT_SAMPLING_CONSTANT,
        }
    }
}

impl ErSampler {
    pub fn new(constant: f64) -> Result<Self, SparsifyError> {
        if !(constant.is_finite() && constant > 0.0) {
            return Err(SparsifyError::InvalidConstant(constant));
        }
        Ok(Self { constant })
    }

    /// Number of draws `q` for a graph on `n` vertices.
    pub fn sample_count(&self, n: usize, epsilon: f64) -> usize {
        let n = n as f64;
        libm::ceil(self.constant * n * libm::log(n) / (epsilon * epsilon)) as usize
    }

    /// Draws `q` edges with replacement, `p_e ∝ w(e) R(e)`, each draw adding
    /// `w(e) / (q p_e)` to the sampled edge. If every edge of `g` was drawn
    /// at least once, `g` itself is returned with certified ε = 0.
    pub fn sparsify(&self, g: &WeightedGraph, epsilon: f64, seed: u64) -> Result<SparsifierResult, SparsifyError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SparsifyError::EpsilonOutOfRange(epsilon));
        }
        if g.m() == 0 {
            return Err(SparsifyError::NoEdges);
        }
        let resistances = effective_resistances(g);
        let scores: Vec<f64> = resistances
            .iter()
            .map(|&(e, r)| g.weight(e).unwrap_or(0.0) * r.max(0.0))
            .collect();
        let total: f64 = scores.iter().sum();
        let q = self.sample_count(g.n(), epsilon).max(1);
        let exact = SparsifierResult {
            h: g.clone(),
            epsilon_target: epsilon,
            epsilon_certified: 0.0,
            seed: Some(seed),
        };
        let Ok(dist) = WeightedIndex::new(&scores) else {
            return Ok(exact);
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for _ in 0..q {
            *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
        }
        if counts.len() >= g.m() {
            return Ok(exact);
        }
        let h = WeightedGraph::from_keyed(
            g.n(),
            counts.iter().map(|(&i, &c)| {
                let (e, _) = resistances[i];
                let p = scores[i] / total;
                let w = g.weight(e).expect("sampled edge belongs to g");
                (e, c as f64 * w / (q as f64 * p))
            }),
        )?;
        Ok(SparsifierResult::certify(g, h, epsilon, Some(seed))?)
    }
}

/// [`ErSampler::sparsify`] with the default constant.
pub fn sparsify_er(g: &WeightedGraph, epsilon: f64, seed: u64) -> Result<SparsifierResult, SparsifyError> {
    ErSampler::default().sparsify(g, epsilon, seed)
}

/// Smallest ε with `(1-ε) L_G <= L_H <= (1+ε) L_G` in the Loewner order.
///
/// Computes the eigenvalues `μ` of `L_G^{+/2} L_H L_G^{+/2}` on the range of
/// `L_G` and returns `max(1 - μ_min, μ_max - 1)`. Returns `f64::INFINITY`
/// when `ker(L_G)` is not contained in `ker(L_H)`: then some `x` has
/// `x^T L_G x = 0 < x^T L_H x` and no finite ε bounds it from above.
pub fn verify_epsilon(g: &WeightedGraph, h: &WeightedGraph) -> Result<f64, GraphError> {
    if g.n() != h.n() {
        return Err(GraphError::DimensionMismatch {
            expected: g.n(),
            found: h.n(),
        });
    }
    let lg = g.laplacian().into_matrix();
    let lh = h.laplacian().into_matrix();
    let spec = SymmetricSpectrum::of(&lg);
    let scale = spec.max_abs().max(lh.diagonal().max());
    if scale == 0.0 {
        return Ok(0.0);
    }

    let kernel = spec.kernel_indices(KERNEL_REL_TOL);
    if !kernel.is_empty() {
        let z = basis(&spec, &kernel);
        let leak = (z.transpose() * &lh * &z).abs().max();
        if leak > 1e-9 * scale {
            return Ok(f64::INFINITY);
        }
    }

    let range = spec.range_indices(KERNEL_REL_TOL);
    if range.is_empty() {
        // L_G = 0 and L_H vanishes on everything, so H = G = edgeless.
        return Ok(0.0);
    }
    let mut u = basis(&spec, &range);
    for (col, &i) in range.iter().enumerate() {
        let s = 1.0 / libm::sqrt(spec.values[i]);
        u.column_mut(col).scale_mut(s);
    }
    let pencil = u.transpose() * &lh * &u;
    let mu = SymmetricSpectrum::of(&pencil).values;
    let lo = mu.first().copied().unwrap_or(1.0);
    let hi = mu.last().copied().unwrap_or(1.0);
    Ok((1.0 - lo).max(hi - 1.0).max(0.0))
}

fn basis(spec: &SymmetricSpectrum, idx: &[usize]) -> DMatrix<f64> {
    let n = spec.values.len();
    let mut out = DMatrix::zeros(n, idx.len());
    for (col, &i) in idx.iter().enumerate() {
        out.set_column(col, &spec.vectors.column(i));
    }
    out
}

/// Smallest ε' with `ε' >= ε`, `1 - ε' <= (1-ε)/c_k` and
/// `(1+ε)/c_1 <= 1 + ε'`: `max(1 - (1-ε)/c_k, (1+ε)/c_1 - 1, ε)`.
///
/// Requires `0 <= ε < 1` and `1 <= c_1 <= c_k`.
pub fn epsilon_prime(epsilon: f64, c1: usize, ck: usize) -> Result<f64, SparsifyError> {
    if !(0.0..1.0).contains(&epsilon) || c1 == 0 || c1 > ck {
        return Err(SparsifyError::InvalidBoundArguments { epsilon, c1, ck });
    }
    let (c1, ck) = (c1 as f64, ck as f64);
    // 1 - (1-ε)/c_k and (1+ε)/c_1 - 1, arranged to be exact when c = 1.
    let lower = (epsilon + (ck - 1.0)) / ck;
    let upper = (epsilon + (1.0 - c1)) / c1;
    Ok(lower.max(upper).max(epsilon))
}

/// Union of per-site sparsifiers, reweighted by `1 / (c_1 c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionSparsifier {
    pub h: WeightedGraph,
    /// Guaranteed approximation factor; `f64::INFINITY` when some part is
    /// not certified below 1.
    pub epsilon_prime: f64,
    /// Largest certified ε among the parts.
    pub epsilon_parts: f64,
    pub c1: usize,
    pub ck: usize,
}

/// Combines `parts[i]`, a sparsifier of `G_i = (V, E_i)`, into
/// `H = (V, ∪ D_i, h)` with `h(e) = sum_i h_i(e) / (c_1 c_k)`.
pub fn union_sparsifiers(parts: &[SparsifierResult], family: &EdgeFamily) -> Result<UnionSparsifier, SparsifyError> {
    if parts.is_empty() {
        return Err(SparsifyError::NoParts);
    }
    if parts.len() != family.len() {
        return Err(SparsifyError::PartCountMismatch {
            sets: family.len(),
            parts: parts.len(),
        });
    }
    let n = family.base().n();
    let mut sums: BTreeMap<EdgeKey, f64> = BTreeMap::new();
    for (index, (part, site)) in parts.iter().zip(family.sets().sets()).enumerate() {
        if part.h.n() != n {
            return Err(SparsifyError::PartVertexMismatch {
                index,
                expected: n,
                found: part.h.n(),
            });
        }
        for (e, w) in part.h.edges() {
            if !site.contains(&e) {
                return Err(SparsifyError::PartOutsideSite { index, edge: e });
            }
            *sums.entry(e).or_insert(0.0) += w;
        }
    }
    let partition = family.overlap_partition();
    let (c1, ck) = (partition.c1(), partition.ck());
    let denom = (c1 * ck) as f64;
    let h = WeightedGraph::from_keyed(n, sums.into_iter().map(|(e, w)| (e, w / denom)))?;

    let epsilon_parts = parts.iter().map(|p| p.epsilon_certified).fold(0.0_f64, f64::max);
    let epsilon_prime = if epsilon_parts < 1.0 {
        epsilon_prime(epsilon_parts, c1, ck)?
    } else {
        f64::INFINITY
    };
    Ok(UnionSparsifier {
        h,
        epsilon_prime,
        epsilon_parts,
        c1,
        ck,
    })
}
