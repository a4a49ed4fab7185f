//! Number-On-Forehead blackboard simulator.
//!
//! Site `j` (1-based, `1 <= j <= s`) holds `E_j` on its forehead: it sees
//! every other site's edge set, `F_j = {E_i : i != j}`, but not its own.
//! Sites communicate only by appending writes to a shared [`Transcript`],
//! which records the cost of every write.
//!
//! Three protocols are simulated:
//!
//! * [`protocol_verify_sunflower`]: one bit per site for sites `1..s-1`,
//!   deciding whether the whole family is a Δ-system.
//! * [`protocol_broadcast_graph`]: on a sunflower allocation, site `j`
//!   writes `Δ_j` so every other site can rebuild `E`, then one other site
//!   writes `E_j` for site `j`.
//! * [`protocol_sparsifier_exchange`]: the same two rounds, but sparsifiers
//!   of `(V, Δ_j)` and `(V, E_j)` are written instead of the raw edge sets,
//!   and each site combines them with [`union_sparsifiers`].
//!
//! `Δ_j` is the petal union of the view, `(∪_{i != j} E_i) \ K`, where `K`
//! is the kernel of `F_j`. This keeps `|∪_{i != j} E_i| = |Δ_j| + λ` for
//! every `s`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{EdgeKey, GraphError, WeightedGraph};
use crate::overlap::{EdgeFamily, FamilyError, SetFamily};
use crate::sparsifier::{union_sparsifiers, ErSampler, SparsifierResult, SparsifyError, UnionSparsifier};
use crate::sunflower::{deza_threshold, is_delta_system_refs, SunflowerError};

/// Bits charged for an edge weight on the blackboard.
pub const WEIGHT_BITS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NofError {
    #[error("{what} needs at least {needed} sites, got {found}")]
    TooFewSites {
        what: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("site {site} out of range 1..={s}")]
    SiteOutOfRange { site: usize, s: usize },
    #[error("the view of site {site} is not a Δ-system")]
    ViewNotDeltaSystem { site: usize },
    #[error("the family is not a Δ-system")]
    NotDeltaSystem,
    #[error("the family is not a weak Δ-system")]
    NotWeakDeltaSystem,
    #[error("the sets visible to site {site} have an empty union")]
    EmptyUnion { site: usize },
    #[error("set of site {site} has {size} edges, expected {ell}")]
    SizeMismatch { site: usize, size: usize, ell: usize },
    #[error("{s} sites is below the threshold {needed} for sets of size {ell}")]
    ThresholdUnmet { s: usize, ell: usize, needed: usize },
    #[error("epsilon {0} is outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error(transparent)]
    Sunflower(#[from] SunflowerError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What site `j` can read: every set except its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteView<T: Ord> {
    pub site: usize,
    /// `(i, E_i)` for every `i != site`, ascending `i`.
    pub visible: Vec<(usize, BTreeSet<T>)>,
}

impl<T: Ord> SiteView<T> {
    pub fn sets(&self) -> impl Iterator<Item = &BTreeSet<T>> {
        self.visible.iter().map(|(_, s)| s)
    }

    pub fn len(&self) -> usize {
        self.visible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visible.is_empty()
    }
}

fn check_site<T: Ord + Clone>(family: &SetFamily<T>, site: usize) -> Result<(), NofError> {
    let s = family.len();
    if s < 2 {
        return Err(NofError::TooFewSites {
            what: "the NOF model",
            needed: 2,
            found: s,
        });
    }
    if site == 0 || site > s {
        return Err(NofError::SiteOutOfRange { site, s });
    }
    Ok(())
}

fn view_refs<T: Ord + Clone>(family: &SetFamily<T>, site: usize) -> Vec<&BTreeSet<T>> {
    family
        .sets()
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 1 != site)
        .map(|(_, s)| s)
        .collect()
}

/// `F_j`.
pub fn site_view<T: Ord + Clone>(family: &SetFamily<T>, site: usize) -> Result<SiteView<T>, NofError> {
    check_site(family, site)?;
    Ok(SiteView {
        site,
        visible: family
            .sets()
            .iter()
            .enumerate()
            .filter(|(i, _)| i + 1 != site)
            .map(|(i, s)| (i + 1, s.clone()))
            .collect(),
    })
}

/// Kernel of `F_j`, failing when `F_j` is not a Δ-system.
pub fn view_kernel<T: Ord + Clone>(family: &SetFamily<T>, site: usize) -> Result<BTreeSet<T>, NofError> {
    check_site(family, site)?;
    let view = view_refs(family, site);
    let report = is_delta_system_refs(&view)?;
    report.kernel.ok_or(NofError::ViewNotDeltaSystem { site })
}

/// `Δ_j = (∪_{i != j} E_i) \ K`, defined when `F_j` is a Δ-system with
/// kernel `K`.
pub fn symmetric_difference_on_site<T: Ord + Clone>(
    family: &SetFamily<T>,
    site: usize,
) -> Result<BTreeSet<T>, NofError> {
    let kernel = view_kernel(family, site)?;
    Ok(view_refs(family, site)
        .into_iter()
        .flat_map(|s| s.iter())
        .filter(|a| !kernel.contains(*a))
        .cloned()
        .collect())
}

/// For a Δ-system family with `s >= 3`: whether every view `F_i` is a
/// Δ-system with the family's kernel. Always `true` on valid input.
pub fn shared_kernel_check<T: Ord + Clone>(family: &SetFamily<T>) -> Result<bool, NofError> {
    let s = family.len();
    if s < 3 {
        return Err(NofError::TooFewSites {
            what: "the shared-kernel property",
            needed: 3,
            found: s,
        });
    }
    let all: Vec<_> = family.sets().iter().collect();
    let kernel = is_delta_system_refs(&all)?.kernel.ok_or(NofError::NotDeltaSystem)?;
    for site in 1..=s {
        let report = is_delta_system_refs(&view_refs(family, site))?;
        if report.kernel.as_ref() != Some(&kernel) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For `s >= 4`: evaluates "every `F_i` is a Δ-system ⇒ the family is a
/// Δ-system". Always `true` on valid input.
///
/// The bound `s >= 4` is necessary: `{1,2}, {2,3}, {1,3}` has every view a
/// two-set (hence trivially Δ) family while the family itself is not a
/// Δ-system.
pub fn views_imply_delta_check<T: Ord + Clone>(family: &SetFamily<T>) -> Result<bool, NofError> {
    let s = family.len();
    if s < 4 {
        return Err(NofError::TooFewSites {
            what: "the view-to-family implication",
            needed: 4,
            found: s,
        });
    }
    let mut premise = true;
    for site in 1..=s {
        if !is_delta_system_refs(&view_refs(family, site))?.is_delta {
            premise = false;
            break;
        }
    }
    let all: Vec<_> = family.sets().iter().collect();
    let conclusion = is_delta_system_refs(&all)?.is_delta;
    Ok(!premise || conclusion)
}

/// `δ(j) = |∩_{i != j} E_i| / |∪_{i != j} E_i|`.
pub fn overlapping_coefficient<T: Ord + Clone>(family: &SetFamily<T>, site: usize) -> Result<f64, NofError> {
    let (inter, union) = view_intersection_union(family, site)?;
    Ok(inter as f64 / union as f64)
}

fn view_intersection_union<T: Ord + Clone>(family: &SetFamily<T>, site: usize) -> Result<(usize, usize), NofError> {
    check_site(family, site)?;
    let view = view_refs(family, site);
    let union: BTreeSet<&T> = view.iter().flat_map(|s| s.iter()).collect();
    if union.is_empty() {
        return Err(NofError::EmptyUnion { site });
    }
    let inter = crate::overlap::intersect_all(view.into_iter());
    Ok((inter.len(), union.len()))
}

/// `δ = max_j δ(j)`.
pub fn greatest_overlapping_coefficient<T: Ord + Clone>(family: &SetFamily<T>) -> Result<f64, NofError> {
    check_site(family, 1)?;
    let mut best = 0.0_f64;
    for site in 1..=family.len() {
        best = best.max(overlapping_coefficient(family, site)?);
    }
    Ok(best)
}

/// `ceil(log2 n)`, the bits of one vertex id.
pub fn vertex_id_bits(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(usize::BITS - (n - 1).leading_zeros())
    }
}

/// Contents of one blackboard write.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", content = "payload", rename_all = "snake_case")
)]
pub enum Payload {
    Bit(bool),
    EdgeSet(Vec<EdgeKey>),
    WeightedEdgeSet(Vec<(EdgeKey, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoardWrite {
    pub site: usize,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub payload: Payload,
    pub bit_cost: u64,
    pub edge_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Round {
    pub writes: Vec<BoardWrite>,
}

/// Append-only blackboard log, grouped into rounds.
///
/// A bit costs 1 bit. An edge costs `2 ceil(log2 n)` bits for its endpoints
/// plus [`WEIGHT_BITS`] when weighted; `edge_cost` counts edges.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transcript {
    vertex_bits: u64,
    rounds: Vec<Round>,
}

impl Transcript {
    /// Transcript for protocols over graphs on `n` vertices.
    pub fn for_vertices(n: usize) -> Self {
        Self {
            vertex_bits: vertex_id_bits(n),
            rounds: Vec::new(),
        }
    }

    pub fn begin_round(&mut self) {
        self.rounds.push(Round::default());
    }

    fn push(&mut self, write: BoardWrite) {
        if self.rounds.is_empty() {
            self.begin_round();
        }
        self.rounds.last_mut().expect("a round is open").writes.push(write);
    }

    pub fn write_bit(&mut self, site: usize, bit: bool) {
        self.push(BoardWrite {
            site,
            payload: Payload::Bit(bit),
            bit_cost: 1,
            edge_cost: 0,
        });
    }

    pub fn write_edges(&mut self, site: usize, edges: Vec<EdgeKey>) {
        let count = edges.len() as u64;
        self.push(BoardWrite {
            site,
            payload: Payload::EdgeSet(edges),
            bit_cost: count * 2 * self.vertex_bits,
            edge_cost: count,
        });
    }

    pub fn write_weighted_edges(&mut self, site: usize, edges: Vec<(EdgeKey, f64)>) {
        let count = edges.len() as u64;
        self.push(BoardWrite {
            site,
            payload: Payload::WeightedEdgeSet(edges),
            bit_cost: count * (2 * self.vertex_bits + WEIGHT_BITS),
            edge_cost: count,
        });
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn writes(&self) -> impl Iterator<Item = &BoardWrite> {
        self.rounds.iter().flat_map(|r| r.writes.iter())
    }

    pub fn bit_cost(&self) -> u64 {
        self.writes().map(|w| w.bit_cost).sum()
    }

    pub fn edge_cost(&self) -> u64 {
        self.writes().map(|w| w.edge_cost).sum()
    }

    pub fn round_edge_cost(&self, round: usize) -> u64 {
        self.rounds
            .get(round)
            .map_or(0, |r| r.writes.iter().map(|w| w.edge_cost).sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SunflowerVerdict {
    pub transcript: Transcript,
    pub verdict: bool,
}

/// Sites `1..s-1` each write whether their view is a Δ-system; the family
/// is a Δ-system iff all bits are set. Costs exactly `s - 1` bits.
pub fn protocol_verify_sunflower<T: Ord + Clone>(family: &SetFamily<T>) -> Result<SunflowerVerdict, NofError> {
    let s = family.len();
    if s < 4 {
        return Err(NofError::TooFewSites {
            what: "sunflower verification",
            needed: 4,
            found: s,
        });
    }
    let mut transcript = Transcript::default();
    transcript.begin_round();
    let mut verdict = true;
    for site in 1..s {
        let bit = is_delta_system_refs(&view_refs(family, site))?.is_delta;
        transcript.write_bit(site, bit);
        verdict &= bit;
    }
    Ok(SunflowerVerdict { transcript, verdict })
}

/// Sunflower parameters shared by the two graph protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct SunflowerShape {
    pub ell: usize,
    pub lambda: usize,
    pub kernel: BTreeSet<EdgeKey>,
}

/// Checks the protocol preconditions: uniform set size `ℓ`, weak Δ-system,
/// and `s >= ℓ² - ℓ + 3`.
pub fn sunflower_shape(family: &SetFamily<EdgeKey>) -> Result<SunflowerShape, NofError> {
    let s = family.len();
    if s < 3 {
        return Err(NofError::TooFewSites {
            what: "sunflower protocols",
            needed: 3,
            found: s,
        });
    }
    let ell = family.sets()[0].len();
    for (i, set) in family.sets().iter().enumerate() {
        if set.len() != ell {
            return Err(NofError::SizeMismatch {
                site: i + 1,
                size: set.len(),
                ell,
            });
        }
    }
    let needed = deza_threshold(ell) + 1;
    if s < needed {
        return Err(NofError::ThresholdUnmet { s, ell, needed });
    }
    let all: Vec<_> = family.sets().iter().collect();
    let report = is_delta_system_refs(&all)?;
    if !report.is_weak_delta {
        return Err(NofError::NotWeakDeltaSystem);
    }
    let kernel = report.kernel.ok_or(NofError::NotDeltaSystem)?;
    Ok(SunflowerShape {
        ell,
        lambda: kernel.len(),
        kernel,
    })
}

fn weighted(base: &WeightedGraph, edges: &BTreeSet<EdgeKey>) -> Vec<(EdgeKey, f64)> {
    edges
        .iter()
        .map(|&e| (e, base.weight(e).expect("family edges belong to the base graph")))
        .collect()
}

/// Everything site `site` can read off the foreheads of the others.
fn visible_weights(family: &EdgeFamily, site: usize) -> BTreeMap<EdgeKey, f64> {
    view_refs(family.sets(), site)
        .into_iter()
        .flat_map(|s| s.iter())
        .map(|&e| {
            (
                e,
                family.base().weight(e).expect("family edges belong to the base graph"),
            )
        })
        .collect()
}

fn other_site(site: usize) -> usize {
    if site == 1 {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastOutcome {
    pub transcript: Transcript,
    pub shape: SunflowerShape,
    /// `δ(j)` of the broadcasting site.
    pub delta: f64,
    /// `|∪_{i != j} E_i|`.
    pub view_union: usize,
    /// Graph rebuilt by site `i`, at index `i - 1`.
    pub reconstructions: Vec<WeightedGraph>,
}

/// Round 1: site `j` writes `Δ_j`; every other site rebuilds `E` from
/// `Δ_j`, the kernel and its own view. Round 2: the lowest-numbered other
/// site writes `E_j` so site `j` can rebuild `E` too.
pub fn protocol_broadcast_graph(family: &EdgeFamily, site: usize) -> Result<BroadcastOutcome, NofError> {
    let sets = family.sets();
    check_site(sets, site)?;
    let shape = sunflower_shape(sets)?;
    let base = family.base();
    let n = base.n();
    let mut transcript = Transcript::for_vertices(n);

    transcript.begin_round();
    let delta_j = symmetric_difference_on_site(sets, site)?;
    let board_delta = weighted(base, &delta_j);
    transcript.write_weighted_edges(site, board_delta.clone());

    let mut reconstructions = Vec::with_capacity(sets.len());
    for i in 1..=sets.len() {
        if i == site {
            reconstructions.push(WeightedGraph::edgeless(n)?);
            continue;
        }
        // E = Δ_j ∪ K ∪ (∪ F_i), and K already lies inside ∪ F_i.
        let mut known = visible_weights(family, i);
        known.extend(board_delta.iter().copied());
        reconstructions.push(WeightedGraph::from_keyed(n, known)?);
    }

    transcript.begin_round();
    let writer = other_site(site);
    let own = sets.set(site - 1).expect("site checked");
    transcript.write_weighted_edges(writer, weighted(base, own));
    let mut known = visible_weights(family, site);
    known.extend(weighted(base, own));
    reconstructions[site - 1] = WeightedGraph::from_keyed(n, known)?;

    let (_, view_union) = view_intersection_union(sets, site)?;
    Ok(BroadcastOutcome {
        transcript,
        delta: overlapping_coefficient(sets, site)?,
        view_union,
        shape,
        reconstructions,
    })
}

/// Seed used by site `site` for its local sampling.
pub fn site_seed(seed: u64, site: usize) -> u64 {
    // splitmix64 finalizer over (seed, site)
    let mut z = seed.wrapping_add((site as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeOutcome {
    pub transcript: Transcript,
    pub shape: SunflowerShape,
    pub delta: f64,
    /// Sparsifier of `(V, Δ_j)` written in round 1; `None` when `Δ_j = ∅`.
    pub petal_sparsifier: Option<SparsifierResult>,
    /// Sparsifier of `(V, E_j)` written in round 2.
    pub own_sparsifier: SparsifierResult,
    /// Site that wrote in round 2.
    pub second_writer: usize,
    /// Union held by site `i`, at index `i - 1`.
    pub sites: Vec<UnionSparsifier>,
}

/// Two-round sparsifier exchange over a sunflower allocation.
///
/// Round 1: site `j` sparsifies `(V, Δ_j)` and writes the weighted result.
/// Every site `i != j` sparsifies `(V, E_j)`, which it can see, and forms
/// the union of the two. Round 2: the lowest-numbered other site writes its
/// sparsifier of `(V, E_j)` so site `j` can form the union as well. Site
/// `k` samples with [`site_seed`]`(seed, k)`.
///
/// `Δ_j` and `E_j` are disjoint and cover `E`, so the union is taken over
/// the two-set family `{Δ_j, E_j}` (just `{E_j}` when `Δ_j` is empty).
pub fn protocol_sparsifier_exchange(
    family: &EdgeFamily,
    site: usize,
    epsilon: f64,
    seed: u64,
    sampler: &ErSampler,
) -> Result<ExchangeOutcome, NofError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(NofError::EpsilonOutOfRange(epsilon));
    }
    let sets = family.sets();
    check_site(sets, site)?;
    let shape = sunflower_shape(sets)?;
    let base = family.base();
    let n = base.n();
    let mut transcript = Transcript::for_vertices(n);

    let delta_j = symmetric_difference_on_site(sets, site)?;
    let own = sets.set(site - 1).expect("site checked").clone();

    let petal_sparsifier = if delta_j.is_empty() {
        None
    } else {
        let g_j = base.induced_subgraph(delta_j.iter().copied())?;
        Some(sampler.sparsify(&g_j, epsilon, site_seed(seed, site))?)
    };
    transcript.begin_round();
    transcript.write_weighted_edges(
        site,
        petal_sparsifier
            .as_ref()
            .map(|r| r.h.edges().collect())
            .unwrap_or_default(),
    );

    let mut union_sets = Vec::with_capacity(2);
    if !delta_j.is_empty() {
        union_sets.push(delta_j.clone());
    }
    union_sets.push(own.clone());
    let union_family = EdgeFamily::new(base.clone(), union_sets)?;
    let g_own = base.induced_subgraph(own.iter().copied())?;

    let combine = |own_part: SparsifierResult| -> Result<UnionSparsifier, NofError> {
        let mut parts = Vec::with_capacity(2);
        if let Some(p) = &petal_sparsifier {
            parts.push(p.clone());
        }
        parts.push(own_part);
        Ok(union_sparsifiers(&parts, &union_family)?)
    };

    let writer = other_site(site);
    let mut sites: Vec<Option<UnionSparsifier>> = (0..sets.len()).map(|_| None).collect();
    let mut own_sparsifier = None;
    for i in (1..=sets.len()).filter(|&i| i != site) {
        let local = sampler.sparsify(&g_own, epsilon, site_seed(seed, i))?;
        if i == writer {
            own_sparsifier = Some(local.clone());
        }
        sites[i - 1] = Some(combine(local)?);
    }
    let own_sparsifier = own_sparsifier.expect("writer is a site other than j");

    transcript.begin_round();
    transcript.write_weighted_edges(writer, own_sparsifier.h.edges().collect());
    sites[site - 1] = Some(combine(own_sparsifier.clone())?);

    Ok(ExchangeOutcome {
        transcript,
        delta: overlapping_coefficient(sets, site)?,
        shape,
        petal_sparsifier,
        own_sparsifier,
        second_writer: writer,
        sites: sites.into_iter().map(|s| s.expect("every site filled")).collect(),
    })
}
