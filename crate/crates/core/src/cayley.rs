//! Exact finite balls of the Cayley graph.
//!
//! Vertices are created in breadth-first shortlex order, so the first word
//! that reaches an element is its shortlex-least geodesic. Candidates `u·s`
//! are matched against earlier vertices that share a quotient hash and sit
//! in an adjacent layer; the match itself is a word-problem call.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fingerprint::WordHasher;
use crate::presentation::{free_reduce_letters, GroupPresentation, Letter, Word};

pub type Vertex = u32;

const NONE: u32 = u32::MAX;

#[derive(Debug)]
pub struct CayleyBall {
    presentation: Arc<GroupPresentation>,
    hasher: WordHasher,
    radius: usize,
    requested_radius: usize,
    complete: bool,
    degree: usize,
    parent: Vec<Vertex>,
    via: Vec<Letter>,
    layer: Vec<u32>,
    adj: Vec<Vertex>,
    layer_start: Vec<usize>,
    buckets: HashMap<u64, Vec<Vertex>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BallStats {
    pub radius: usize,
    pub requested_radius: usize,
    pub complete: bool,
    pub vertices: usize,
    pub edges: usize,
    pub per_layer: Vec<usize>,
}

pub fn build_ball(p: Arc<GroupPresentation>, radius: usize, vertex_budget: usize) -> Result<CayleyBall> {
    if vertex_budget == 0 {
        return Err(Error::Domain("vertex budget must be positive".into()));
    }
    if !p.is_verified() {
        return Err(Error::StrategyNotVerified(p.name().to_string()));
    }
    let degree = p.alphabet().size();
    let hasher = WordHasher::new(&p);
    let mut b = CayleyBall {
        presentation: p,
        hasher,
        radius: 0,
        requested_radius: radius,
        complete: true,
        degree,
        parent: vec![NONE],
        via: vec![Letter(0)],
        layer: vec![0],
        adj: vec![NONE; degree],
        layer_start: vec![0, 1],
        buckets: HashMap::new(),
    };
    let h0 = b.hasher.hash(std::iter::empty());
    b.buckets.insert(h0, vec![0]);

    for k in 0..radius {
        let (lo, hi) = (b.layer_start[k], b.layer_start[k + 1]);
        let mut overflow = false;
        'layer: for u in lo..hi {
            let rep = b.rep_letters(u as Vertex);
            for s in 0..degree {
                if b.adj[u * degree + s] != NONE {
                    continue;
                }
                let s = Letter(s as u8);
                let h = b.hasher.hash(rep.iter().copied().chain([s]));
                match b.find_in_bucket(h, &rep, s, k.saturating_sub(1), k + 1) {
                    Some(v) => b.link(u as Vertex, s, v),
                    None => {
                        if b.parent.len() >= vertex_budget {
                            overflow = true;
                            break 'layer;
                        }
                        let v = b.parent.len() as Vertex;
                        b.parent.push(u as Vertex);
                        b.via.push(s);
                        b.layer.push(k as u32 + 1);
                        b.adj.extend(std::iter::repeat(NONE).take(degree));
                        b.buckets.entry(h).or_default().push(v);
                        b.link(u as Vertex, s, v);
                    }
                }
            }
        }
        if overflow {
            b.truncate_to(k + 1);
            b.complete = false;
            break;
        }
        b.layer_start.push(b.parent.len());
        b.radius = k + 1;
    }
    b.close_last_layer();
    Ok(b)
}

impl CayleyBall {
    fn link(&mut self, u: Vertex, s: Letter, v: Vertex) {
        let d = self.degree;
        self.adj[u as usize * d + s.index()] = v;
        self.adj[v as usize * d + s.inverse().index()] = u;
    }

    /// Vertex in the bucket with layer in `lo..=hi` equal to `rep·s`.
    fn find_in_bucket(&self, h: u64, rep: &[Letter], s: Letter, lo: usize, hi: usize) -> Option<Vertex> {
        let bucket = self.buckets.get(&h)?;
        let p = &self.presentation;
        bucket.iter().copied().find(|&v| {
            let l = self.layer[v as usize] as usize;
            if l < lo || l > hi {
                return false;
            }
            let other = self.rep_letters(v);
            p.is_identity_letters(
                rep.iter()
                    .copied()
                    .chain([s])
                    .chain(other.iter().rev().map(|x| x.inverse())),
            )
        })
    }

    /// Drop every vertex of layer `k` and beyond.
    fn truncate_to(&mut self, k: usize) {
        let keep = self.layer_start[k];
        self.parent.truncate(keep);
        self.via.truncate(keep);
        self.layer.truncate(keep);
        self.adj.truncate(keep * self.degree);
        for e in self.adj.iter_mut() {
            if *e != NONE && *e as usize >= keep {
                *e = NONE;
            }
        }
        for bucket in self.buckets.values_mut() {
            bucket.retain(|&v| (v as usize) < keep);
        }
        self.buckets.retain(|_, b| !b.is_empty());
        self.layer_start.truncate(k + 1);
    }

    /// Fill edges between vertices of the outermost layer.
    fn close_last_layer(&mut self) {
        let k = self.radius;
        let (lo, hi) = (self.layer_start[k], self.layer_start[k + 1]);
        for u in lo..hi {
            let rep = self.rep_letters(u as Vertex);
            for s in 0..self.degree {
                if self.adj[u * self.degree + s] != NONE {
                    continue;
                }
                let s = Letter(s as u8);
                let h = self.hasher.hash(rep.iter().copied().chain([s]));
                if let Some(v) = self.find_in_bucket(h, &rep, s, k, k) {
                    self.link(u as Vertex, s, v);
                }
            }
        }
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn shared_presentation(&self) -> Arc<GroupPresentation> {
        Arc::clone(&self.presentation)
    }

    pub fn hasher(&self) -> &WordHasher {
        &self.hasher
    }

    /// Radius actually built; below the requested radius if the budget ran out.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn layer(&self, v: Vertex) -> usize {
        self.layer[v as usize] as usize
    }

    /// Vertices at distance exactly `k` from the identity.
    pub fn sphere(&self, k: usize) -> std::ops::Range<Vertex> {
        if k > self.radius {
            return 0..0;
        }
        self.layer_start[k] as Vertex..self.layer_start[k + 1] as Vertex
    }

    /// Vertices at distance at most `k`.
    pub fn ball(&self, k: usize) -> std::ops::Range<Vertex> {
        0..self.layer_start[k.min(self.radius) + 1] as Vertex
    }

    pub fn neighbor(&self, v: Vertex, s: Letter) -> Option<Vertex> {
        let w = self.adj[v as usize * self.degree + s.index()];
        (w != NONE).then_some(w)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Letter, Vertex)> + '_ {
        let d = self.degree;
        self.adj[v as usize * d..(v as usize + 1) * d]
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != NONE)
            .map(|(s, &w)| (Letter(s as u8), w))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&w| w != NONE).count()
    }

    pub(crate) fn rep_letters(&self, mut v: Vertex) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.layer[v as usize] as usize);
        while v != 0 {
            out.push(self.via[v as usize]);
            v = self.parent[v as usize];
        }
        out.reverse();
        out
    }

    /// Shortlex-least geodesic word for `v`.
    pub fn rep(&self, v: Vertex) -> Word {
        Word(self.rep_letters(v))
    }

    /// The vertex equal to the given letters, if that element lies in the ball.
    pub fn locate_letters(&self, letters: impl IntoIterator<Item = Letter>) -> Option<Vertex> {
        let w = free_reduce_letters(letters);
        let mut v: Vertex = 0;
        for (i, &x) in w.iter().enumerate() {
            match self.neighbor(v, x) {
                Some(next) => v = next,
                None => return self.locate_by_hash(&w[i..], v),
            }
        }
        Some(v)
    }

    fn locate_by_hash(&self, rest: &[Letter], from: Vertex) -> Option<Vertex> {
        let prefix = self.rep_letters(from);
        let h = self.hasher.hash(prefix.iter().chain(rest).copied());
        let bucket = self.buckets.get(&h)?;
        bucket.iter().copied().find(|&v| {
            let other = self.rep_letters(v);
            self.presentation.is_identity_letters(
                prefix
                    .iter()
                    .chain(rest)
                    .copied()
                    .chain(other.iter().rev().map(|x| x.inverse())),
            )
        })
    }

    pub fn locate(&self, w: &Word) -> Option<Vertex> {
        self.locate_letters(w.letters().iter().copied())
    }

    /// `x · w` if it lies in the ball.
    pub fn translate(&self, x: Vertex, w: &[Letter]) -> Option<Vertex> {
        let mut v = x;
        for (i, &s) in w.iter().enumerate() {
            match self.neighbor(v, s) {
                Some(next) => v = next,
                None => {
                    let rep = self.rep_letters(v);
                    return self.locate_letters(rep.into_iter().chain(w[i..].iter().copied()));
                }
            }
        }
        Some(v)
    }

    /// `x⁻¹ y` if it lies in the ball.
    pub fn quotient(&self, x: Vertex, y: Vertex) -> Option<Vertex> {
        let a = self.rep_letters(x);
        let b = self.rep_letters(y);
        self.locate_letters(a.iter().rev().map(|s| s.inverse()).chain(b))
    }

    pub fn require_radius(&self, what: &str, needed: usize) -> Result<()> {
        if needed > self.radius {
            return Err(Error::radius(what, needed, self.radius));
        }
        Ok(())
    }

    pub fn stats(&self) -> BallStats {
        BallStats {
            radius: self.radius,
            requested_radius: self.requested_radius,
            complete: self.complete,
            vertices: self.len(),
            edges: self.edge_count(),
            per_layer: (0..=self.radius).map(|k| self.sphere(k).len()).collect(),
        }
    }
}

/// Exact `d(x, y)` when `layer(x) + layer(y) <= radius`; `None` otherwise.
pub fn ball_distance(b: &CayleyBall, x: Vertex, y: Vertex) -> Option<usize> {
    if x == y {
        return Some(0);
    }
    if b.layer(x) + b.layer(y) > b.radius() {
        return None;
    }
    let mut dist = vec![u32::MAX; b.len()];
    let mut queue = VecDeque::from([x]);
    dist[x as usize] = 0;
    while let Some(u) = queue.pop_front() {
        for (_, v) in b.neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = dist[u as usize] + 1;
                if v == y {
                    return Some(dist[v as usize] as usize);
                }
                queue.push_back(v);
            }
        }
    }
    None
}

/// Distance through the group element `x⁻¹y`, exact whenever it lies in the ball.
pub(crate) fn element_distance(b: &CayleyBall, x: Vertex, y: Vertex) -> Option<usize> {
    b.quotient(x, y).map(|v| b.layer(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// All triangles with corners `1, x, y` where `x, y` lie within this layer.
    Exhaustive { corner_layer: usize },
    Random { triangles: usize, seed: u64 },
}

fn path_vertices(b: &CayleyBall, start: Vertex, word: &[Letter]) -> Option<Vec<Vertex>> {
    let mut out = vec![start];
    let mut v = start;
    for &s in word {
        v = b.translate(v, &[s])?;
        out.push(v);
    }
    Some(out)
}

/// Largest slimness defect of a triangle with corners `1, x, y`, or `None`
/// when some needed distance leaves the ball.
fn triangle_defect(b: &CayleyBall, x: Vertex, y: Vertex) -> Option<usize> {
    let side_x = path_vertices(b, 0, &b.rep_letters(x))?;
    let side_y = path_vertices(b, 0, &b.rep_letters(y))?;
    let q = b.quotient(x, y)?;
    let side_xy = path_vertices(b, x, &b.rep_letters(q))?;
    let sides = [&side_x, &side_y, &side_xy];
    let mut worst = 0;
    for i in 0..3 {
        for &p in sides[i].iter() {
            let mut best = usize::MAX;
            for (j, side) in sides.iter().enumerate() {
                if j == i {
                    continue;
                }
                for &t in side.iter() {
                    best = best.min(element_distance(b, p, t)?);
                }
            }
            worst = worst.max(best);
        }
    }
    Some(worst)
}

/// Lower bound for δ from geodesic triangles with a corner at the identity.
pub fn estimate_delta(b: &CayleyBall, sample: Sampling) -> usize {
    let pairs: Vec<(Vertex, Vertex)> = match sample {
        Sampling::Exhaustive { corner_layer } => {
            let n = b.ball(corner_layer).end;
            (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect()
        }
        Sampling::Random { triangles, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = b.ball(b.radius() / 2).end;
            (0..triangles)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        }
    };
    pairs
        .par_iter()
        .filter_map(|&(x, y)| triangle_defect(b, x, y))
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DaggerResult {
    Bound { n: usize },
    /// No outside path of length at most `n_max` inside the ball. `exact` is
    /// true when the search never touched the outer layer, so enlarging the
    /// ball could not change the answer.
    Failure { x: String, y: String, exact: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DaggerRadius {
    pub r0: usize,
    pub pairs: usize,
    pub result: DaggerResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DaggerVerdict {
    #[serde(rename = "M")]
    pub m: usize,
    pub n_max: usize,
    pub per_radius: Vec<DaggerRadius>,
    pub n: Option<usize>,
}

struct OutsideSearch {
    /// Shortest outside path lengths to each requested target.
    found: Vec<Option<usize>>,
    touched_boundary: bool,
}

fn outside_bfs(b: &CayleyBall, x: Vertex, targets: &[Vertex], r0: usize, n_max: usize) -> OutsideSearch {
    let mut dist: HashMap<Vertex, usize> = HashMap::from([(x, 0)]);
    let mut queue = VecDeque::from([x]);
    let mut remaining = targets.iter().filter(|&&t| t != x).count();
    let mut touched = false;
    while let Some(u) = queue.pop_front() {
        if remaining == 0 {
            break;
        }
        let du = dist[&u];
        if b.layer(u) == b.radius() {
            touched = true;
        }
        if du == n_max {
            continue;
        }
        for (_, v) in b.neighbors(u) {
            if b.layer(v) < r0 || dist.contains_key(&v) {
                continue;
            }
            dist.insert(v, du + 1);
            if targets.contains(&v) {
                remaining -= 1;
            }
            queue.push_back(v);
        }
    }
    OutsideSearch {
        found: targets.iter().map(|t| dist.get(t).copied()).collect(),
        touched_boundary: touched,
    }
}

/// Test ‡_n for every sphere radius `R0 >= 1` with `2·R0 + 1 <= radius`.
pub fn check_double_dagger(b: &CayleyBall, m: usize, n_max: usize) -> Result<DaggerVerdict> {
    if m == 0 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    let r0s: Vec<usize> = (1..).take_while(|r| 2 * r + 1 <= b.radius()).collect();
    if r0s.is_empty() {
        return Err(Error::radius("double dagger check", 3, b.radius()));
    }
    let mut per_radius = Vec::new();
    for r0 in r0s {
        let sphere: Vec<Vertex> = b.sphere(r0).collect();
        let rows: Vec<(Vertex, Vec<Vertex>)> = sphere
            .par_iter()
            .map(|&x| {
                let near = sphere
                    .iter()
                    .copied()
                    .filter(|&y| y > x && element_distance(b, x, y).is_some_and(|d| d <= m))
                    .collect();
                (x, near)
            })
            .collect();
        let pairs = rows.iter().map(|(_, v)| v.len()).sum();
        let outcomes: Vec<std::result::Result<usize, (Vertex, Vertex, bool)>> = rows
            .par_iter()
            .map(|(x, near)| {
                let s = outside_bfs(b, *x, near, r0, n_max);
                let mut worst = 0;
                for (y, d) in near.iter().zip(&s.found) {
                    match d {
                        Some(d) => worst = worst.max(*d),
                        None => return Err((*x, *y, !s.touched_boundary)),
                    }
                }
                Ok(worst)
            })
            .collect();
        let p = b.presentation();
        let result = match outcomes.iter().find_map(|o| o.err()) {
            Some((x, y, exact)) => DaggerResult::Failure {
                x: p.format(&b.rep(x)),
                y: p.format(&b.rep(y)),
                exact,
            },
            None => DaggerResult::Bound {
                n: outcomes.iter().filter_map(|o| o.ok()).max().unwrap_or(0),
            },
        };
        per_radius.push(DaggerRadius { r0, pairs, result });
    }
    let n = per_radius
        .iter()
        .map(|r| match r.result {
            DaggerResult::Bound { n } => Some(n),
            DaggerResult::Failure { .. } => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().max().unwrap_or(0));
    Ok(DaggerVerdict { m, n_max, per_radius, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free2() -> Arc<GroupPresentation> {
        Arc::new(GroupPresentation::free("f2", "ab").unwrap())
    }

    #[test]
    fn free_ball_counts() {
        let b = build_ball(free2(), 3, 1 << 20).unwrap();
        assert_eq!(b.len(), 53);
        assert_eq!(b.stats().per_layer, vec![1, 4, 12, 36]);
    }

    #[test]
    fn budget_truncates_to_complete_layer() {
        let b = build_ball(free2(), 3, 20).unwrap();
        assert!(!b.is_complete());
        assert_eq!(b.radius(), 2);
        assert_eq!(b.len(), 17);
        assert!(b.locate(&b.presentation().word("aab").unwrap()).is_none());
    }

    #[test]
    fn locate_and_distances() {
        let b = build_ball(free2(), 3, 1 << 20).unwrap();
        let p = b.presentation();
        let a = b.locate(&p.word("a").unwrap()).unwrap();
        let bb = b.locate(&p.word("b").unwrap()).unwrap();
        assert_eq!(ball_distance(&b, 0, a), Some(1));
        assert_eq!(ball_distance(&b, a, bb), Some(2));
        assert_eq!(ball_distance(&b, a, a), Some(0));
        assert_eq!(b.locate(&p.word("abBA").unwrap()), Some(0));
    }

    #[test]
    fn free_group_delta_is_zero() {
        let b = build_ball(free2(), 6, 1 << 20).unwrap();
        assert_eq!(estimate_delta(&b, Sampling::Exhaustive { corner_layer: 2 }), 0);
        let tiny = build_ball(free2(), 0, 10).unwrap();
        assert_eq!(estimate_delta(&tiny, Sampling::Exhaustive { corner_layer: 0 }), 0);
    }
}
