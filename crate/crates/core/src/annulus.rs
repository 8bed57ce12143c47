//! Points of the annular region around H, and finite H-covers of it.
//!
//! `N_{r,R}(H)` is the set of points with `r <= d(x,H) <= R`, `C_K(H)` the
//! points at distance exactly `K`, and `A_{r,R,K}(H)` the union of the
//! components of `N_{r,R}(H)` that meet `C_K(H)`.

use std::collections::{HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{CayleyBall, Vertex};
use crate::constants::ConstantLedger;
use crate::digraph::{build_digraph, digraph_components};
use crate::error::{Error, Result};
use crate::subgroup::{project, HElement, Projection, SubgroupContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Below,
    Annulus { on_ck: bool },
    Above,
}

pub fn classify_point(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, x: Vertex) -> Result<PointClass> {
    Ok(match project(ctx, b, x, c.big_r())? {
        Projection::Beyond(_) => PointClass::Above,
        Projection::Within { dist, .. } if dist < c.r() => PointClass::Below,
        Projection::Within { dist, .. } => PointClass::Annulus { on_ck: dist == c.k() },
    })
}

/// A cover vertex with its distance to H and its right coset `Hx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPoint {
    pub vertex: Vertex,
    pub dist: usize,
    /// Canonical shortest element of `Hx`.
    pub coset: Vertex,
    /// `witness · coset = vertex`.
    pub witness: HElement,
}

#[derive(Clone, Debug)]
pub struct FiniteCover {
    pub points: Vec<CoverPoint>,
    index: HashMap<Vertex, usize>,
    /// Component id of each point.
    pub component: Vec<usize>,
    /// Points of each component, ordered by vertex.
    pub components: Vec<Vec<usize>>,
    pub marked: Vec<bool>,
    pub basepoints: Vec<Vertex>,
    pub generation: usize,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CoverSummary {
    pub generation: usize,
    pub vertices: usize,
    pub component_sizes: Vec<usize>,
    pub marked: Vec<bool>,
}

/// Label connected parts `0, 1, ...` in order of first appearance.
pub(crate) fn canonical_labels(uf: &UnionFind<usize>, n: usize) -> (Vec<usize>, usize) {
    let mut ids = HashMap::new();
    let labels = (0..n)
        .map(|i| {
            let root = uf.find(i);
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect();
    (labels, ids.len())
}

impl FiniteCover {
    fn assemble(b: &CayleyBall, mut points: Vec<CoverPoint>, basepoints: Vec<Vertex>, generation: usize, k: usize) -> Self {
        points.sort_by_key(|p| p.vertex);
        let index: HashMap<Vertex, usize> = points.iter().enumerate().map(|(i, p)| (p.vertex, i)).collect();
        let mut uf = UnionFind::new(points.len());
        for (i, p) in points.iter().enumerate() {
            for (_, w) in b.neighbors(p.vertex) {
                if let Some(&j) = index.get(&w) {
                    uf.union(i, j);
                }
            }
        }
        let (component, count) = canonical_labels(&uf, points.len());
        let mut components = vec![Vec::new(); count];
        for (i, &c) in component.iter().enumerate() {
            components[c].push(i);
        }
        let marked = components
            .iter()
            .map(|comp| comp.iter().any(|&i| points[i].dist == k))
            .collect();
        FiniteCover {
            points,
            index,
            component,
            components,
            marked,
            basepoints,
            generation,
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn component_of(&self, v: Vertex) -> Option<usize> {
        self.position(v).map(|i| self.component[i])
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// The cover restricted to the given components.
    pub fn restrict(&self, b: &CayleyBall, keep: &[bool]) -> FiniteCover {
        let points = self
            .points
            .iter()
            .zip(&self.component)
            .filter(|(_, &c)| keep[c])
            .map(|(p, _)| p.clone())
            .collect();
        FiniteCover::assemble(b, points, self.basepoints.clone(), self.generation, self.k)
    }

    pub fn summary(&self) -> CoverSummary {
        CoverSummary {
            generation: self.generation,
            vertices: self.len(),
            component_sizes: self.components.iter().map(Vec::len).collect(),
            marked: self.marked.clone(),
        }
    }
}

/// Ball radius needed for a cover around `x`.
pub fn cover_radius(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, x: Vertex) -> usize {
    b.layer(x) + 2 * ctx.l() + c.big_r()
}

fn project_all(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, vertices: &[Vertex]) -> Result<Vec<CoverPoint>> {
    // Warm the shared word cache before fanning out.
    if ctx.enumerates() {
        ctx.y_words(ctx.y_bound(b.radius() + c.big_r()))?;
    }
    let projected: Vec<Result<Option<CoverPoint>>> = vertices
        .par_iter()
        .map(|&v| {
            Ok(match project(ctx, b, v, c.big_r())? {
                Projection::Within { dist, rep, witness } if dist >= c.r() => Some(CoverPoint {
                    vertex: v,
                    dist,
                    coset: rep,
                    witness,
                }),
                _ => None,
            })
        })
        .collect();
    projected.into_iter().filter_map(|r| r.transpose()).collect()
}

fn ball_around(b: &CayleyBall, x: Vertex, depth: usize, seen: &mut HashMap<Vertex, usize>) {
    let mut queue = VecDeque::from([(x, 0usize)]);
    let mut local: HashMap<Vertex, usize> = HashMap::from([(x, 0)]);
    seen.entry(x).or_insert(0);
    while let Some((u, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for (_, w) in b.neighbors(u) {
            if !local.contains_key(&w) {
                local.insert(w, d + 1);
                seen.entry(w).or_insert(d + 1);
                queue.push_back((w, d + 1));
            }
        }
    }
}

/// `N_{r,R}(H) ∩ B_{2l+R}(p)` over the union of basepoints `p`.
pub fn build_cover_at(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, basepoints: &[Vertex]) -> Result<FiniteCover> {
    let depth = 2 * ctx.l() + c.big_r();
    for &x in basepoints {
        b.require_radius("finite cover", b.layer(x) + depth)?;
    }
    let mut seen = HashMap::new();
    for &x in basepoints {
        ball_around(b, x, depth, &mut seen);
    }
    let mut vertices: Vec<Vertex> = seen.into_keys().collect();
    vertices.sort_unstable();
    let points = project_all(b, ctx, c, &vertices)?;
    Ok(FiniteCover::assemble(b, points, basepoints.to_vec(), 0, c.k()))
}

pub fn build_cover(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, x: Vertex) -> Result<FiniteCover> {
    build_cover_at(b, ctx, c, &[x])
}

/// Decide `x ∈ A_{r,R,K}(H)`.
pub fn in_arrk(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, x: Vertex) -> Result<bool> {
    if !matches!(classify_point(b, ctx, c, x)?, PointClass::Annulus { .. }) {
        return Ok(false);
    }
    let bases = if x == 0 { vec![0] } else { vec![0, x] };
    let f = build_cover_at(b, ctx, c, &bases)?;
    let delta = build_digraph(&f, ctx, b)?;
    let comps = digraph_components(&delta);
    let own = comps[f.component_of(x).expect("x lies in its own cover")];
    Ok((0..delta.vertex_count()).any(|v| comps[v] == own && f.marked[v]))
}

/// `F_{i+1} = Y F_i ∪ F_i`.
pub fn grow_cover(f: &FiniteCover, ctx: &SubgroupContext, b: &CayleyBall) -> Result<FiniteCover> {
    let mut points = f.points.clone();
    let mut have: HashMap<Vertex, ()> = f.points.iter().map(|p| (p.vertex, ())).collect();
    for p in &f.points {
        for (yi, y) in ctx.y_letters().iter().enumerate() {
            let word: Vec<_> = y.iter().copied().chain(b.rep_letters(p.vertex)).collect();
            let v = b.locate_letters(word.iter().copied()).ok_or_else(|| {
                Error::radius("grown cover", b.layer(p.vertex) + y.len(), b.radius())
            })?;
            if have.insert(v, ()).is_none() {
                let mut yw = vec![yi as u8];
                yw.extend(&p.witness.y);
                let yw = crate::digraph::reduce_y(yw);
                points.push(CoverPoint {
                    vertex: v,
                    dist: p.dist,
                    coset: p.coset,
                    witness: ctx.element(yw),
                });
            }
        }
    }
    Ok(FiniteCover::assemble(b, points, f.basepoints.clone(), f.generation + 1, f.k))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cayley::build_ball;
    use crate::constants::{desk_constants, Parameters, Rational};
    use crate::presentation::GroupPresentation;

    fn free_axis(radius: usize) -> (CayleyBall, SubgroupContext) {
        let p = Arc::new(GroupPresentation::free("f2", "ab").unwrap());
        let b = build_ball(Arc::clone(&p), radius, 1 << 22).unwrap();
        let ctx = SubgroupContext::new(p.clone(), vec![p.word("a").unwrap()], 0, Rational::from_integer(1), Rational::from_integer(0)).unwrap();
        (b, ctx)
    }

    #[test]
    fn classify_examples() {
        let (b, ctx) = free_axis(5);
        let p = b.presentation();
        let at = |s: &str| b.locate(&p.word(s).unwrap()).unwrap();
        let c = desk_constants(&Parameters::default(), 1, 1, 2).unwrap();
        assert_eq!(classify_point(&b, &ctx, &c, 0).unwrap(), PointClass::Below);
        assert_eq!(classify_point(&b, &ctx, &c, at("b")).unwrap(), PointClass::Annulus { on_ck: true });
        assert_eq!(classify_point(&b, &ctx, &c, at("bbb")).unwrap(), PointClass::Above);
    }

    #[test]
    fn free_axis_cover_has_two_sides() {
        let (b, ctx) = free_axis(5);
        let c = desk_constants(&Parameters::default(), 1, 1, 1).unwrap();
        let f = build_cover(&b, &ctx, &c, 0).unwrap();
        assert!(f.points.iter().all(|p| p.dist == 1));
        assert!(f.marked.iter().all(|&m| m));
        // One b-side and one B-side branch per axis point a^k, |k| <= 2.
        assert_eq!(f.component_count(), 10);
        let g = grow_cover(&f, &ctx, &b).unwrap();
        assert!(g.len() > f.len());
        assert!(f.points.iter().all(|p| g.position(p.vertex).is_some()));
    }
}
