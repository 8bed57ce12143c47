mod common;

use std::sync::Arc;

use hypsplit::cayley::{build_ball, Vertex};
use hypsplit::folding::{fold, folded_member};
use hypsplit::subgroup::{distance_to_subgroup, is_member, project, subgroup_ball, Projection};
use proptest::prelude::*;

use common::{codes, ctx, free2, reduce, surface, word};

#[test]
fn powers_of_a_generator() {
    let p = surface();
    let b = build_ball(Arc::clone(&p), 6, 1 << 22).unwrap();
    let h = ctx(&p, &["b"]);
    let bw = codes(&p.word("b").unwrap());
    for k in -8i32..=8 {
        let pow: Vec<u8> = (0..k.unsigned_abs()).map(|_| if k > 0 { bw[0] } else { bw[0] ^ 1 }).collect();
        assert!(is_member(&h, &b, &word(&pow)).unwrap(), "b^{k}");
        for x in [0u8, 4, 6] {
            let mut w = pow.clone();
            w.push(x);
            assert!(!is_member(&h, &b, &word(&reduce(w))).unwrap(), "b^{k}·{x}");
        }
    }
}

#[test]
fn distance_zero_iff_member_and_triangle() {
    let p = surface();
    let b = build_ball(Arc::clone(&p), 5, 1 << 22).unwrap();
    let h = ctx(&p, &["a"]);
    let r = 3;
    let d: Vec<usize> = b.ball(r).map(|v| distance_to_subgroup(&h, &b, v).unwrap()).collect();
    for v in b.ball(r) {
        let member = is_member(&h, &b, &b.rep(v)).unwrap();
        assert_eq!(d[v as usize] == 0, member);
        for (_, w) in b.neighbors(v) {
            if b.layer(w) <= r {
                assert!(d[v as usize].abs_diff(d[w as usize]) <= 1);
            }
        }
    }
}

#[test]
fn subgroup_ball_is_exact_and_monotone() {
    let p = free2();
    let b = build_ball(Arc::clone(&p), 4, 1 << 22).unwrap();
    for gens in [vec!["a"], vec!["ab", "bba"], vec!["aB", "ba"]] {
        let h = ctx(&p, &gens);
        let g = fold(&gens.iter().map(|s| codes(&p.word(s).unwrap())).collect::<Vec<_>>());
        let mut previous: Vec<Vertex> = Vec::new();
        for len in 0..=4 {
            let got = subgroup_ball(&h, &b, len).unwrap();
            let brute: Vec<Vertex> = b.ball(len).filter(|&v| folded_member(&g, &codes(&b.rep(v)))).collect();
            assert_eq!(got, brute, "{gens:?} at {len}");
            assert!(previous.iter().all(|v| got.contains(v)));
            previous = got;
        }
    }
}

fn free_word(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 1..=max).prop_map(|w| reduce(w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn free_projection_matches_brute_force(gens in prop::collection::vec(free_word(3), 1..=2), x in 0u32..161) {
        let gens: Vec<Vec<u8>> = gens.into_iter().filter(|g| !g.is_empty()).collect();
        prop_assume!(!gens.is_empty());
        let p = free2();
        let b = build_ball(Arc::clone(&p), 8, 1 << 22).unwrap();
        let texts: Vec<String> = gens.iter().map(|g| p.format(&word(g))).collect();
        let h = ctx(&p, &texts.iter().map(String::as_str).collect::<Vec<_>>());
        let g = fold(&gens);
        let xw = codes(&b.rep(x));
        // A nearest h has |h| <= 2|x|.
        let mut best: Option<(usize, Vertex)> = None;
        for v in b.ball(2 * xw.len()) {
            let hw = codes(&b.rep(v));
            if !folded_member(&g, &hw) {
                continue;
            }
            let q = reduce(common::invert(&hw).into_iter().chain(xw.iter().copied()));
            if q.len() > xw.len() {
                continue;
            }
            let key = (q.len(), b.locate(&word(&q)).unwrap());
            if best.is_none_or(|bst| key < bst) {
                best = Some(key);
            }
        }
        let (dist, rep) = best.unwrap();
        match project(&h, &b, x, 4).unwrap() {
            Projection::Within { dist: d, rep: r, witness } => {
                prop_assert_eq!((d, r), (dist, rep));
                let back = reduce(codes(&witness.word()).into_iter().chain(codes(&b.rep(r))));
                prop_assert_eq!(back, xw);
            }
            Projection::Beyond(_) => prop_assert!(false, "x lies in the ball of radius 4"),
        }
    }
}
