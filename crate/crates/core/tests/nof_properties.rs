use std::collections::BTreeSet;

use dspars_core::generate::{random_graph_with_edges, sunflower_allocation};
use dspars_core::nof::{
    greatest_overlapping_coefficient, overlapping_coefficient, shared_kernel_check, symmetric_difference_on_site,
    vertex_id_bits, views_imply_delta_check, WEIGHT_BITS,
};
use dspars_core::{
    is_delta_system, protocol_broadcast_graph, protocol_sparsifier_exchange, protocol_verify_sunflower, verify_epsilon,
    EdgeFamily, ErSampler, NofError, SetFamily,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sunflower(kernel: usize, petal: usize, s: usize) -> SetFamily<u32> {
    let core: Vec<u32> = (0..kernel as u32).collect();
    let sets = (0..s)
        .map(|i| {
            let start = (kernel + i * petal) as u32;
            core.iter().copied().chain(start..start + petal as u32).collect()
        })
        .collect();
    SetFamily::new(sets)
}

fn star_family(s: usize, seed: u64) -> EdgeFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph_with_edges(12, 1 + 2 * s, (0.5, 2.0), &mut rng).unwrap();
    sunflower_allocation(&g, 1, 2, 0, &mut rng).unwrap()
}

proptest! {
    #[test]
    fn views_of_sunflowers_share_the_kernel(kernel in 0usize..4, petal in 1usize..4, s in 3usize..9) {
        prop_assert!(shared_kernel_check(&sunflower(kernel, petal, s)).unwrap());
    }

    #[test]
    fn view_implication_holds_for_arbitrary_families(
        sets in proptest::collection::vec(proptest::collection::btree_set(0u8..8, 1..5), 4..8)
    ) {
        prop_assert!(views_imply_delta_check(&SetFamily::new(sets)).unwrap());
    }

    #[test]
    fn verify_sunflower_matches_direct_check(
        sets in proptest::collection::vec(proptest::collection::btree_set(0u8..10, 1..5), 4..9)
    ) {
        let family = SetFamily::new(sets.clone());
        let run = protocol_verify_sunflower(&family).unwrap();
        prop_assert_eq!(run.verdict, is_delta_system(&sets).unwrap().is_delta);
        prop_assert_eq!(run.transcript.bit_cost(), (sets.len() - 1) as u64);
        prop_assert_eq!(run.transcript.round_count(), 1);
    }

    #[test]
    fn broadcast_reconstructs_everywhere(s in 9usize..14, seed in any::<u64>(), site_pick in any::<usize>()) {
        let family = star_family(s, seed);
        let site = 1 + site_pick % s;
        let out = protocol_broadcast_graph(&family, site).unwrap();
        for g in &out.reconstructions {
            prop_assert_eq!(g, family.base());
        }
        let delta = symmetric_difference_on_site(family.sets(), site).unwrap();
        prop_assert_eq!(delta.len(), out.view_union - out.shape.kernel.len());
        let per_edge = 2 * vertex_id_bits(12) + WEIGHT_BITS;
        prop_assert_eq!(out.transcript.round_edge_cost(0), delta.len() as u64);
        let round1_bits: u64 = out.transcript.rounds()[0].writes.iter().map(|w| w.bit_cost).sum();
        prop_assert_eq!(round1_bits, delta.len() as u64 * per_edge);
        prop_assert_eq!(out.transcript.round_count(), 2);
        let coefficient = overlapping_coefficient(family.sets(), site).unwrap();
        prop_assert!((out.delta - coefficient).abs() < 1e-15);
        prop_assert!(coefficient <= greatest_overlapping_coefficient(family.sets()).unwrap());
    }
}

#[test]
fn view_implication_needs_four_sites() {
    let triangle = SetFamily::new(vec![
        BTreeSet::from([1, 2]),
        BTreeSet::from([2, 3]),
        BTreeSet::from([1, 3]),
    ]);
    assert!(matches!(
        views_imply_delta_check(&triangle),
        Err(NofError::TooFewSites { needed: 4, .. })
    ));
}

#[test]
fn perturbed_sunflower_is_rejected() {
    let mut sets = sunflower(2, 2, 6).sets().to_vec();
    sets[3].remove(&0);
    let run = protocol_verify_sunflower(&SetFamily::new(sets)).unwrap();
    assert!(!run.verdict);
    assert_eq!(run.transcript.bit_cost(), 5);
}

#[test]
fn exchange_unions_are_certified_and_deterministic() {
    let family = star_family(9, 3);
    let sampler = ErSampler::default();
    for site in [1, 4, 9] {
        let a = protocol_sparsifier_exchange(&family, site, 0.5, 17, &sampler).unwrap();
        let b = protocol_sparsifier_exchange(&family, site, 0.5, 17, &sampler).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.transcript.round_count(), 2);
        for union in &a.sites {
            let eps = verify_epsilon(family.base(), &union.h).unwrap();
            assert!(eps <= union.epsilon_prime + 1e-9, "{eps} > {}", union.epsilon_prime);
        }
    }
}

#[test]
fn protocols_refuse_small_or_irregular_families() {
    let small = star_family(6, 5);
    assert!(matches!(
        protocol_broadcast_graph(&small, 1),
        Err(NofError::ThresholdUnmet { .. })
    ));
    let three = SetFamily::new(vec![BTreeSet::from([1]), BTreeSet::from([2]), BTreeSet::from([3])]);
    assert!(protocol_verify_sunflower(&three).is_err());
}
