//! Δ-systems (sunflowers) and weak Δ-systems.
//!
//! A family `A_1, .., A_t` is a Δ-system with kernel `K` when every pairwise
//! intersection equals `K = ∩ A_k`. It is a weak Δ-system when all pairwise
//! intersections merely have the same size `λ`. A weak Δ-system with at
//! least `ℓ² - ℓ + 2` members, `ℓ = max |A_i|`, is a Δ-system.

use alloc::collections::BTreeSet;

use thiserror::Error;

use crate::overlap::intersect_all;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SunflowerError {
    #[error("Δ-system tests need at least 2 sets, got {0}")]
    TooFewSets(usize),
}

/// Structure found by [`is_delta_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSystemReport<T: Ord> {
    pub is_delta: bool,
    /// `∩ A_k`, present when `is_delta`.
    pub kernel: Option<BTreeSet<T>>,
    pub is_weak_delta: bool,
    /// Common pairwise intersection size, present when `is_weak_delta`.
    pub lambda: Option<usize>,
    /// `max |A_i|`.
    pub ell: usize,
}

/// Classifies `sets` as Δ-system and weak Δ-system.
pub fn is_delta_system<T: Ord + Clone>(sets: &[BTreeSet<T>]) -> Result<DeltaSystemReport<T>, SunflowerError> {
    is_delta_system_refs(&sets.iter().collect::<alloc::vec::Vec<_>>())
}

pub(crate) fn is_delta_system_refs<T: Ord + Clone>(
    sets: &[&BTreeSet<T>],
) -> Result<DeltaSystemReport<T>, SunflowerError> {
    if sets.len() < 2 {
        return Err(SunflowerError::TooFewSets(sets.len()));
    }
    let kernel = intersect_all(sets.iter().copied());
    let ell = sets.iter().map(|s| s.len()).max().unwrap_or(0);
    // The kernel sits inside every pairwise intersection, so equality is a
    // size comparison.
    let mut is_delta = true;
    let mut common: Option<usize> = None;
    let mut is_weak = true;
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            let size = sets[i].intersection(sets[j]).count();
            if size != kernel.len() {
                is_delta = false;
            }
            match common {
                None => common = Some(size),
                Some(c) if c != size => is_weak = false,
                Some(_) => {}
            }
        }
    }
    Ok(DeltaSystemReport {
        is_delta,
        lambda: if is_weak { common } else { None },
        kernel: if is_delta { Some(kernel) } else { None },
        is_weak_delta: is_weak,
        ell,
    })
}

/// `ℓ² - ℓ + 2`: a weak Δ-system of at least this many sets of size at most
/// `ℓ` is a Δ-system.
pub fn deza_threshold(ell: usize) -> usize {
    ell * ell - ell + 2
}
