mod common;

use cayley_chid::events::{coset_union_event, good_pair_event, normalizer_event, CosetPairs};
use cayley_chid::group::{enumerate_group_automorphisms, EnumerationCaps};
use cayley_chid::sampler::{sample_connection_set, RandomStream};
use cayley_chid::ConnectionSet;
use proptest::prelude::*;

use common::spec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coset_witnesses_reverify(k in 0usize..6, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = spec(["9", "12", "2,2,3", "3,3", "2,2,2", "15"][k]);
        let s = sample_connection_set(&g, p, RandomStream::new(seed, 0)).unwrap();
        if let Some(w) = coset_union_event(&g, &s, &EnumerationCaps::default()).unwrap() {
            prop_assert!(w.h > 1 && w.k < g.order() && w.k % w.h == 0 && g.order().is_multiple_of(w.k));
            prop_assert!(w.subgroup_h.iter().all(|x| w.subgroup_k.contains(x)));
            prop_assert!(w.l <= w.h && w.j <= g.involution_count());
            // S∖K equals the union of the H-cosets it meets
            let outside: Vec<usize> = s.to_vec().into_iter().filter(|x| !w.subgroup_k.contains(x)).collect();
            let mut union = Vec::new();
            for &a in &outside {
                for &h in &w.subgroup_h {
                    union.push(g.add_index(a, h));
                }
            }
            union.sort_unstable();
            union.dedup();
            prop_assert_eq!(union, outside);
        }
    }

    #[test]
    fn normalizer_witnesses_reverify(k in 0usize..5, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = spec(["5", "7", "2,2", "3,3", "2,2,3"][k]);
        let s = sample_connection_set(&g, p, RandomStream::new(seed, 1)).unwrap();
        if let Some(phi) = normalizer_event(&g, &s, &EnumerationCaps::default()).unwrap() {
            prop_assert!(!phi.is_identity());
            prop_assert!((0..g.order()).any(|x| phi.apply(x) != g.neg_index(x)));
            let mut image: Vec<usize> = s.to_vec().iter().map(|&x| phi.apply(x)).collect();
            image.sort_unstable();
            prop_assert_eq!(image, s.to_vec());
        }
    }
}

#[test]
fn prime_cyclic_groups_never_have_coset_witnesses() {
    for p in [2usize, 3, 5, 7, 11, 13, 17, 19, 23] {
        let g = spec(&p.to_string());
        let pairs = CosetPairs::new(&g, &EnumerationCaps::default()).unwrap();
        assert!(pairs.is_empty());
        for k in 0..10 {
            let s = sample_connection_set(&g, 0.5, RandomStream::new(12, k)).unwrap();
            assert!(pairs.first_witness(&s).unwrap().is_none());
        }
    }
}

#[test]
fn normalizer_event_holds_for_empty_and_full_sets() {
    let caps = EnumerationCaps::default();
    for group in ["5", "7", "8", "2,2", "3,3", "35", "2,2,3,3"] {
        let g = spec(group);
        // groups whose only automorphisms are 1 and i have no candidate
        if enumerate_group_automorphisms(&g, &caps).unwrap().len() <= 2 {
            continue;
        }
        for seed in 0..5 {
            for p in [0.0, 1.0] {
                let s = sample_connection_set(&g, p, RandomStream::new(seed, 0)).unwrap();
                assert!(normalizer_event(&g, &s, &caps).unwrap().is_some(), "{group}, p = {p}");
            }
        }
    }
}

#[test]
fn good_pairs_only_at_the_extremes() {
    let z35 = spec("35");
    for k in 0..50 {
        let s = sample_connection_set(&z35, 0.5, RandomStream::new(1, k)).unwrap();
        let expected = s.is_empty() || s.size() == 34;
        assert_eq!(good_pair_event(&z35, &s).unwrap(), expected);
    }
    let t2 = spec("2,2,3,3");
    assert!(!good_pair_event(&t2, &ConnectionSet::full(&t2)).unwrap());
}
