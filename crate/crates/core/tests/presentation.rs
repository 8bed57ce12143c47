mod common;

use std::collections::{HashSet, VecDeque};

use hypsplit::presentation::{free_reduce, Word};
use proptest::prelude::*;

use common::{codes, reduce, surface, word};

fn letters(rank: u8, max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..2 * rank, 0..=max)
}

/// All cyclic conjugates of the relators and their inverses.
fn relator_cycles(rels: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for r in rels {
        for base in [r.clone(), common::invert(r)] {
            for i in 0..base.len() {
                out.push(base[i..].iter().chain(&base[..i]).copied().collect());
            }
        }
    }
    out
}

/// Breadth-first search of the rewriting graph: free cancellation and
/// replacing a relator piece by the inverse of its complement, never
/// exceeding `cap` letters.
fn rewrites_to_empty(w: &[u8], cycles: &[Vec<u8>], cap: usize) -> bool {
    let start = reduce(w.iter().copied());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if u.is_empty() {
            return true;
        }
        for c in cycles {
            for len in 1..c.len() {
                let piece = &c[..len];
                let complement = common::invert(&c[len..]);
                for i in 0..u.len() {
                    if u[i..].starts_with(piece) {
                        let next = reduce(u[..i].iter().chain(&complement).chain(&u[i + len..]).copied());
                        if next.len() <= cap && seen.insert(next.clone()) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    false
}

proptest! {
    #[test]
    fn free_reduce_is_idempotent_and_shortening(w in letters(3, 20)) {
        let once = free_reduce(&word(&w));
        prop_assert!(once.len() <= w.len());
        prop_assert_eq!(free_reduce(&once), once.clone());
        prop_assert!(once.is_freely_reduced());
    }

    #[test]
    fn identity_is_an_equivalence(u in letters(4, 5), v in letters(4, 5), w in letters(4, 5)) {
        let p = surface();
        let eq = |x: &[u8], y: &[u8]| p.is_identity(&word(&reduce(x.iter().copied().chain(common::invert(y))))).unwrap();
        prop_assert!(eq(&u, &u));
        prop_assert_eq!(eq(&u, &v), eq(&v, &u));
        if eq(&u, &v) && eq(&v, &w) {
            prop_assert!(eq(&u, &w));
        }
    }
}

#[test]
fn identity_matches_rewriting_search() {
    let p = surface();
    let rels: Vec<Vec<u8>> = p.relators().iter().map(codes).collect();
    let cycles = relator_cycles(&rels);
    let mut samples: Vec<Vec<u8>> = Vec::new();
    // Every cyclic conjugate, and short conjugates of them.
    for c in &cycles {
        samples.push(c.clone());
        for x in 0..8u8 {
            samples.push(reduce([x].into_iter().chain(c.iter().copied()).chain([x ^ 1])));
        }
    }
    let mut rng = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        rng
    };
    for _ in 0..3000 {
        let len = (next() % 9) as usize;
        samples.push((0..len).map(|_| (next() % 8) as u8).collect());
    }
    let mut identities = 0;
    for w in samples.iter().filter(|w| w.len() <= 10) {
        let expected = rewrites_to_empty(w, &cycles, w.len().max(8));
        let got = p.is_identity(&word(w)).unwrap();
        assert_eq!(got, expected, "word {}", p.format(&word(w)));
        identities += usize::from(got);
    }
    assert!(identities > 16);
}

#[test]
fn relators_are_identities() {
    let p = surface();
    for r in p.relators() {
        assert!(p.is_identity(r).unwrap());
        assert!(p.is_identity(&r.inverse()).unwrap());
        assert!(!p.is_identity(&Word(r.letters()[..7].to_vec())).unwrap());
    }
}
