mod common;

use cayley_chid::sampler::{sample_connection_set, trial_count, RandomStream};
use cayley_chid::{CayleyGraph, ConnectionSet, GroupSpec};
use proptest::prelude::*;

use common::spec;

fn arb_spec() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(vec!["7", "12", "2,2,3,3", "25", "2,4", "3,3", "2,2,2", "35", "6,6", "2,2,2,2,3"]).prop_map(spec)
}

proptest! {
    #[test]
    fn sampled_sets_satisfy_their_invariants(g in arb_spec(), p in 0.0f64..=1.0, seed in any::<u64>(), stream in 0u64..1000) {
        let s = sample_connection_set(&g, p, RandomStream::new(seed, stream)).unwrap();
        prop_assert!(!s.contains(0));
        for x in s.to_vec() {
            prop_assert!(s.contains(g.neg_index(x)));
        }
        let d = s.decomposition();
        prop_assert_eq!(s.size(), d.x_prime + 2 * d.x_double_prime);
        prop_assert!(d.x_prime < g.involution_count());
        let again = sample_connection_set(&g, p, RandomStream::new(seed, stream)).unwrap();
        prop_assert_eq!(&again, &s);
        let back = ConnectionSet::from_json(&g, &s.to_json()).unwrap();
        prop_assert_eq!(back.to_vec(), s.to_vec());
    }

    #[test]
    fn cayley_graphs_are_regular_and_vertex_transitive(g in arb_spec(), p in 0.0f64..=1.0, seed in any::<u64>()) {
        let s = sample_connection_set(&g, p, RandomStream::new(seed, 0)).unwrap();
        let c = CayleyGraph::build(&g, &s).unwrap();
        let graph = c.graph();
        for u in 0..c.order() {
            prop_assert_eq!(graph.degree(u), s.size());
            for v in 0..c.order() {
                prop_assert_eq!(graph.adjacent(u, v), graph.adjacent(v, u));
            }
        }
        prop_assert!(graph.is_automorphism(&c.inversion()));
        for a in 0..c.order() {
            prop_assert!(graph.is_automorphism(&c.translation(a)));
        }
    }
}

#[test]
fn sample_means_match_expectations() {
    // (n − 1)p and (m − 1)p, within 4 standard errors
    for (group, p) in [("2,2,3,3", 0.2), ("2,2,2,5", 0.5), ("24", 0.7)] {
        let g = spec(group);
        let trials = 4000;
        let (mut sizes, mut primes) = (Vec::new(), Vec::new());
        for k in 0..trials {
            let s = sample_connection_set(&g, p, RandomStream::new(77, k)).unwrap();
            sizes.push(s.size() as f64);
            primes.push(s.decomposition().x_prime as f64);
        }
        let n = g.order() as f64;
        let m = g.involution_count() as f64;
        for (values, expected) in [(&sizes, (n - 1.0) * p), (&primes, (m - 1.0) * p)] {
            let mean = values.iter().sum::<f64>() / trials as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
            let se = (var / trials as f64).sqrt();
            assert!((mean - expected).abs() <= 4.0 * se, "{group}: mean {mean} vs {expected} (SE {se})");
        }
    }
}

#[test]
fn draw_count_is_one_per_inverse_pair() {
    for (g, expected) in [("35", 17), ("2,2,3,3", 3 + 16), ("2,2,2", 7), ("8", 1 + 3)] {
        assert_eq!(trial_count(&spec(g)), expected, "{g}");
    }
}
