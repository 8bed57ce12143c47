use hypsplit::constants::{derive_paper_constants, desk_constants, Parameters, Rational};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Parameters> {
    (0i64..4, 0i64..4, 1i64..4, 0i64..3, 2i64..5, 2i64..5, 1i64..4, 1i64..4, prop::option::of(0i64..6)).prop_map(
        |(delta, q, lambda, epsilon, n, a, k1, k2, eta)| Parameters {
            delta,
            q,
            lambda: Rational::from_integer(lambda),
            epsilon: Rational::from_integer(epsilon),
            n,
            a: Rational::from_integer(a),
            k1: Rational::from_integer(k1),
            k2: Rational::from_integer(k1) + Rational::new(k2 - 1, 2),
            eta,
        },
    )
}

proptest! {
    #[test]
    fn paper_constants_are_monotone(p in params(), which in 0usize..3) {
        let base = derive_paper_constants(&p).unwrap();
        let mut bigger = p.clone();
        match which {
            0 => bigger.delta += 1,
            1 => bigger.q += 1,
            _ => bigger.eta = Some(base.eta + 1),
        }
        let more = derive_paper_constants(&bigger).unwrap();
        prop_assert!(more.r >= base.r && more.k >= base.k && more.big_r >= base.big_r);
    }

    #[test]
    fn paper_constants_pass_desk_checks(p in params()) {
        let l = derive_paper_constants(&p).unwrap();
        prop_assert!(l.warnings.is_empty());
        let again = desk_constants(&p, l.r, l.k, l.big_r).unwrap();
        prop_assert!(again.warnings.is_empty());
        prop_assert!(l.r <= l.k && l.k <= l.big_r);
    }

    #[test]
    fn lowering_a_paper_constant_warns(p in params()) {
        let l = derive_paper_constants(&p).unwrap();
        let low = desk_constants(&p, l.r, l.k, l.k.max(l.big_r - 1)).unwrap();
        prop_assert!(!low.warnings.is_empty());
    }
}

#[test]
fn tree_constants() {
    let l = desk_constants(&Parameters::default(), 1, 1, 2).unwrap();
    assert_eq!((l.c, l.m), (0, 3));
}

#[test]
fn bad_triples_are_rejected() {
    for (r, k, big_r) in [(3, 2, 4), (1, 3, 2), (-1, 0, 0)] {
        assert!(desk_constants(&Parameters::default(), r, k, big_r).is_err());
    }
}
