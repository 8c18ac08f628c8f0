use cayley_chid::bounds::{
    chernoff_size_tail, janson_delta_bound, janson_mu, janson_tail, lemma21_core, lemma21_value, JansonTail,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn lemma21_core_is_symmetric_and_minimal_at_half(p in 0.001f64..0.999, c1 in 1.5f64..12.0, c2 in 1.5f64..60.0) {
        let a = lemma21_core(p, c1, c2).unwrap();
        let b = lemma21_core(1.0 - p, c1, c2).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(b));
        prop_assert!(a >= lemma21_core(0.5, c1, c2).unwrap() * (1.0 - 1e-9));
        prop_assert!(a.is_finite() && a >= 0.0);
    }

    #[test]
    fn lemma21_value_agrees_with_direct_evaluation(n in 2.0f64..200.0, p in 0.05f64..0.95, c1 in 1.5f64..4.0, c2 in 1.5f64..4.0) {
        let r = lemma21_value(n, p, c1, c2).unwrap();
        let direct = n.powf(n.log2()) * lemma21_core(p, c1, c2).unwrap();
        prop_assert!((r.value - direct).abs() <= 1e-9 * direct);
        prop_assert_eq!(r.parameters.len(), 4);
    }

    #[test]
    fn chernoff_tail_decreases_in_t(p in 0.01f64..0.99, t in 0.01f64..20.0, dt in 0.001f64..5.0) {
        let a = chernoff_size_tail(36, 4, p, t).unwrap();
        let b = chernoff_size_tail(36, 4, p, t + dt).unwrap();
        prop_assert!(b <= a);
        prop_assert!(a > 0.0 && a <= 2.0);
    }

    #[test]
    fn janson_tail_decreases_in_mu(delta in 0.1f64..1000.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let t_lo = janson_tail(lo * delta, delta).bound().unwrap();
        let t_hi = janson_tail(hi * delta, delta).bound().unwrap();
        prop_assert!(t_hi <= t_lo);
    }

    #[test]
    fn delta_bound_dominates_mu(k in 0usize..12, q in 0.0f64..=1.0) {
        let n = [5usize, 7, 11, 13, 17, 19, 23, 25, 29, 31, 35, 37][k];
        let mu = janson_mu(n, q).unwrap();
        let delta = janson_delta_bound(n, q).unwrap();
        prop_assert!(delta >= mu);
        if q > 0.0 && n > 5 {
            prop_assert!(matches!(janson_tail(mu, delta), JansonTail::Bound(_)));
        }
    }
}

#[test]
fn parameter_errors() {
    assert!(chernoff_size_tail(36, 4, 0.2, -1.0).is_err());
    assert!(chernoff_size_tail(36, 4, 1.2, 1.0).is_err());
    assert!(lemma21_core(1.0, 2.0, 2.0).is_err());
    assert!(janson_mu(25, -0.1).is_err());
    assert!(janson_delta_bound(15, 0.5).is_err());
}
