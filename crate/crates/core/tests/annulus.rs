mod common;

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use hypsplit::annulus::{build_cover, classify_point, grow_cover, in_arrk, PointClass};
use hypsplit::cayley::{build_ball, CayleyBall, Vertex};
use hypsplit::constants::{desk_constants, ConstantLedger, Parameters};
use hypsplit::subgroup::{distance_to_subgroup, SubgroupContext};

use common::{ctx, free2, surface};

fn triple(r: i64, k: i64, big_r: i64) -> ConstantLedger {
    desk_constants(&Parameters::default(), r, k, big_r).unwrap()
}

#[test]
fn cover_points_lie_in_the_annulus() {
    let p = surface();
    let b = build_ball(Arc::clone(&p), 6, 1 << 22).unwrap();
    let h = ctx(&p, &["a"]);
    let c = triple(1, 1, 3);
    let f = build_cover(&b, &h, &c, 0).unwrap();
    assert!(!f.is_empty());
    for pt in &f.points {
        assert!(matches!(classify_point(&b, &h, &c, pt.vertex).unwrap(), PointClass::Annulus { .. }));
    }
}

/// Component of `N_{r,R}(H)` around `x` by plain BFS inside the ball.
fn meets_sphere_directly(b: &CayleyBall, h: &SubgroupContext, c: &ConstantLedger, x: Vertex) -> bool {
    let d = |v: Vertex| distance_to_subgroup(h, b, v).unwrap();
    let inside = |v: Vertex| (c.r()..=c.big_r()).contains(&d(v));
    if !inside(x) {
        return false;
    }
    let mut seen = HashSet::from([x]);
    let mut queue = VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        if d(u) == c.k() {
            return true;
        }
        for (_, w) in b.neighbors(u) {
            if inside(w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    false
}

#[test]
fn in_arrk_matches_direct_definition() {
    let p = free2();
    let b = build_ball(Arc::clone(&p), 9, 1 << 22).unwrap();
    for gens in [vec!["a"], vec!["ab"]] {
        let h = ctx(&p, &gens);
        for c in [triple(1, 1, 2), triple(1, 2, 3), triple(2, 2, 3)] {
            let depth = 2 * h.l() + c.big_r();
            let mut hits = 0;
            for x in b.ball(9 - depth) {
                let got = in_arrk(&b, &h, &c, x).unwrap();
                assert_eq!(got, meets_sphere_directly(&b, &h, &c, x), "{gens:?} x = {}", p.format(&b.rep(x)));
                hits += usize::from(got);
            }
            assert!(hits > 0);
        }
    }
}

#[test]
fn growth_is_extensive() {
    let p = surface();
    let b = build_ball(Arc::clone(&p), 7, 1 << 22).unwrap();
    let h = ctx(&p, &["a"]);
    let f0 = build_cover(&b, &h, &triple(1, 1, 2), 0).unwrap();
    let f1 = grow_cover(&f0, &h, &b).unwrap();
    let f2 = grow_cover(&f1, &h, &b).unwrap();
    let set = |f: &hypsplit::annulus::FiniteCover| f.points.iter().map(|q| q.vertex).collect::<HashSet<_>>();
    assert!(set(&f0).is_subset(&set(&f1)));
    assert!(set(&f1).is_subset(&set(&f2)));
    assert!(f1.len() > f0.len());
}

#[test]
fn growth_is_stable_once_it_stops() {
    let p = free2();
    let b = build_ball(Arc::clone(&p), 6, 1 << 22).unwrap();
    let h = ctx(&p, &[]);
    let f0 = build_cover(&b, &h, &triple(1, 1, 2), 0).unwrap();
    let f1 = grow_cover(&f0, &h, &b).unwrap();
    let f2 = grow_cover(&f1, &h, &b).unwrap();
    let set = |f: &hypsplit::annulus::FiniteCover| f.points.iter().map(|q| q.vertex).collect::<Vec<_>>();
    assert_eq!(set(&f0), set(&f1));
    assert_eq!(set(&f1), set(&f2));
}
