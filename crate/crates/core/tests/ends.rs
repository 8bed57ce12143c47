mod common;

use std::collections::HashSet;
use std::sync::Arc;

use hypsplit::cayley::build_ball;
use hypsplit::constants::{desk_constants, Parameters};
use hypsplit::ends::{action_kernel, ends_of_pair, filtered_ends, rung, upper_bound, Filtered, FoldingOracle};
use proptest::prelude::*;

use common::{ctx, free2, surface};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn e_pair_is_at_most_the_upper_bound(r in 1i64..3, dk in 0i64..2, dr in 0i64..3, which in 0usize..3) {
        let p = free2();
        let gens = [vec!["a"], vec!["ab"], vec!["a", "bb"]][which].clone();
        let h = ctx(&p, &gens);
        let c = desk_constants(&Parameters::default(), r, r + dk, r + dk + dr).unwrap();
        let b = build_ball(Arc::clone(&p), 2 * h.l() + c.big_r(), 1 << 22).unwrap();
        let e = rung(&b, &h, &c).unwrap().e_pair;
        prop_assert!(e <= upper_bound(&b, &h, &c).unwrap());
    }

    #[test]
    fn action_kernel_passes_orbit_stabilizer(perms in prop::collection::vec(Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(), 1..=2)) {
        let action = action_kernel(perms.clone());
        // Closure of the image group.
        let identity: Vec<usize> = (0..5).collect();
        let mut group = HashSet::from([identity.clone()]);
        let mut frontier = vec![identity];
        while let Some(g) = frontier.pop() {
            for s in &perms {
                let h: Vec<usize> = g.iter().map(|&x| s[x]).collect();
                if group.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
        prop_assert_eq!(action.index, group.len());
        for x in 0..5 {
            let orbit: HashSet<usize> = group.iter().map(|g| g[x]).collect();
            let stabilizer = group.iter().filter(|g| g[x] == x).count();
            prop_assert_eq!(orbit.len() * stabilizer, action.index);
        }
        for w in &action.kernel_generators {
            let mut g: Vec<usize> = (0..5).collect();
            for &l in w {
                let s = &perms[(l / 2) as usize];
                g = if l % 2 == 0 {
                    g.iter().map(|&x| s[x]).collect()
                } else {
                    g.iter().map(|&x| s.iter().position(|&y| y == x).unwrap()).collect()
                };
            }
            prop_assert_eq!(g, (0..5).collect::<Vec<_>>());
        }
    }
}

#[test]
fn unstable_ladders_carry_no_value() {
    let p = free2();
    let h = ctx(&p, &["a"]);
    let c = desk_constants(&Parameters::default(), 1, 1, 2).unwrap();
    let b = build_ball(Arc::clone(&p), 6, 1 << 22).unwrap();
    let report = ends_of_pair(&b, &h, &c, &[(1, 1, 2), (2, 2, 4)]).unwrap();
    assert!(!report.stabilized);
    assert_eq!(report.e_pair, None);
    let single = ends_of_pair(&b, &h, &c, &[(1, 1, 2)]).unwrap();
    assert!(!single.stabilized);
}

#[test]
fn finite_index_has_no_ends() {
    let p = free2();
    let h = ctx(&p, &["a", "baB", "bb"]);
    let c = desk_constants(&Parameters::default(), 1, 2, 3).unwrap();
    let b = build_ball(Arc::clone(&p), 10, 1 << 22).unwrap();
    let report = ends_of_pair(&b, &h, &c, &[(1, 2, 3), (2, 2, 4)]).unwrap();
    assert_eq!(report.e_pair, Some(0));
    assert!(report.finite_index);
}

#[test]
fn filtered_ends_bound_e_pair() {
    let p = surface();
    let h = ctx(&p, &["a"]);
    let c = desk_constants(&Parameters::default(), 1, 1, 4).unwrap();
    let b = build_ball(Arc::clone(&p), 7, 1 << 24).unwrap();
    let e = rung(&b, &h, &c).unwrap().e_pair;
    let f = filtered_ends(&b, &h, &c, 3, &FoldingOracle).unwrap();
    match f.filtered {
        Filtered::Finite(n) => assert!(n >= e, "{n} < {e}"),
        other => panic!("{other:?}"),
    }
}
