//! The adjacency digraph Δ_F over the components of a finite H-cover, and
//! the language data read off it.
//!
//! Points `w, u` of the cover in the same right coset satisfy `w = s·u` with
//! `s = h_w h_u⁻¹ ∈ H`, which is exactly an `s`-edge from the component of
//! `w` to the component of `u`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::annulus::{canonical_labels, FiniteCover};
use crate::cayley::{CayleyBall, Vertex};
use crate::error::{Error, Result};
use crate::folding::{self, fold, folded_member};
use crate::presentation::{free_reduce_letters, GroupPresentation};
use crate::subgroup::{HElement, SubgroupContext};

/// Free reduction of a Y-word.
pub fn reduce_y(w: Vec<u8>) -> Vec<u8> {
    folding::reduce(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

#[derive(Clone, Debug)]
pub struct AdjacencyDigraph {
    pub marks: Vec<bool>,
    /// The adjacency set S_F.
    pub labels: Vec<HElement>,
    pub label_inverse: Vec<usize>,
    pub edges: Vec<Edge>,
}

pub(crate) fn y_product(a: &[u8], b_inv: &[u8]) -> Vec<u8> {
    reduce_y(a.iter().copied().chain(folding::inverse(b_inv)).collect())
}

/// Interns subgroup elements up to equality in G.
struct LabelTable<'a> {
    ctx: &'a SubgroupContext,
    labels: Vec<HElement>,
    by_hash: HashMap<u64, Vec<usize>>,
}

impl<'a> LabelTable<'a> {
    fn intern(&mut self, e: HElement) -> usize {
        let h = self.ctx.hash_letters(e.g.iter().copied());
        let p = self.ctx.presentation();
        let bucket = self.by_hash.entry(h).or_default();
        if let Some(&i) = bucket.iter().find(|&&i| p.equal(&self.labels[i].g, &e.g)) {
            return i;
        }
        bucket.push(self.labels.len());
        self.labels.push(e);
        self.labels.len() - 1
    }
}

fn coset_groups(f: &FiniteCover) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, p) in f.points.iter().enumerate() {
        groups.entry(p.coset).or_default().push(i);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

fn raw_edges(f: &FiniteCover, ctx: &SubgroupContext) -> (Vec<HElement>, Vec<(usize, usize, usize)>) {
    let mut table = LabelTable {
        ctx,
        labels: Vec::new(),
        by_hash: HashMap::new(),
    };
    let mut edges = HashSet::new();
    let mut memo: HashMap<Vec<u8>, usize> = HashMap::new();
    for group in coset_groups(f) {
        for &i in &group {
            for &j in &group {
                if i == j {
                    continue;
                }
                let (w, u) = (&f.points[i], &f.points[j]);
                let y = y_product(&w.witness.y, &u.witness.y);
                let label = match memo.get(&y) {
                    Some(&l) => l,
                    None => {
                        let l = table.intern(ctx.element(y.clone()));
                        memo.insert(y, l);
                        l
                    }
                };
                edges.insert((f.component[i], f.component[j], label));
            }
        }
    }
    (table.labels, edges.into_iter().collect())
}

fn label_key(e: &HElement) -> (usize, Vec<u8>, Vec<u8>) {
    (e.g.len(), e.g.iter().map(|x| x.0).collect(), e.y.clone())
}

/// S_F: the nontrivial `h ∈ H` with `hF ∩ F ≠ ∅`.
pub fn adjacency_set(f: &FiniteCover, ctx: &SubgroupContext, _b: &CayleyBall) -> Result<Vec<HElement>> {
    Ok(build_digraph_inner(f, ctx)?.labels)
}

pub fn build_digraph(f: &FiniteCover, ctx: &SubgroupContext, _b: &CayleyBall) -> Result<AdjacencyDigraph> {
    let d = build_digraph_inner(f, ctx)?;
    d.audit_symmetry()?;
    Ok(d)
}

/// Point pairs compared when building the digraph.
pub const PAIR_BUDGET: usize = 1 << 22;

fn build_digraph_inner(f: &FiniteCover, ctx: &SubgroupContext) -> Result<AdjacencyDigraph> {
    let pairs: usize = coset_groups(f).iter().map(|g| g.len() * g.len()).sum();
    if pairs > PAIR_BUDGET {
        return Err(Error::CombinatorialBlowup(PAIR_BUDGET));
    }
    let (labels, raw) = raw_edges(f, ctx);
    let p = ctx.presentation();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| label_key(&labels[i]));
    let mut new_id = vec![0; labels.len()];
    for (k, &i) in order.iter().enumerate() {
        new_id[i] = k;
    }
    let labels: Vec<HElement> = order.iter().map(|&i| labels[i].clone()).collect();
    let mut by_hash: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, e) in labels.iter().enumerate() {
        by_hash.entry(ctx.hash_letters(e.g.iter().copied())).or_default().push(i);
    }
    let label_inverse = labels
        .iter()
        .map(|e| {
            let inv: Vec<_> = e.inverse_letters().collect();
            by_hash
                .get(&ctx.hash_letters(inv.iter().copied()))
                .and_then(|bucket| bucket.iter().copied().find(|&i| p.equal(&labels[i].g, &inv)))
                .unwrap_or(usize::MAX)
        })
        .collect();
    let mut edges: Vec<Edge> = raw
        .into_iter()
        .map(|(from, to, l)| Edge {
            from,
            to,
            label: new_id[l],
        })
        .collect();
    edges.sort();
    Ok(AdjacencyDigraph {
        marks: f.marked.clone(),
        labels,
        label_inverse,
        edges,
    })
}

impl AdjacencyDigraph {
    /// A digraph given directly by its edges; each edge's reverse is added.
    pub fn from_parts(marks: Vec<bool>, labels: Vec<HElement>, edges: &[(usize, usize, usize)], p: &GroupPresentation) -> Self {
        let mut labels = labels;
        let mut all = Vec::new();
        for &(u, v, l) in edges {
            let inv: Vec<_> = labels[l].inverse_letters().collect();
            let li = match labels.iter().position(|o| p.equal(&o.g, &inv)) {
                Some(i) => i,
                None => {
                    let e = labels[l].inverse();
                    labels.push(e);
                    labels.len() - 1
                }
            };
            all.push(Edge { from: u, to: v, label: l });
            all.push(Edge { from: v, to: u, label: li });
        }
        all.sort();
        all.dedup();
        let label_inverse = labels
            .iter()
            .map(|e| {
                let inv: Vec<_> = e.inverse_letters().collect();
                labels.iter().position(|o| p.equal(&o.g, &inv)).unwrap_or(usize::MAX)
            })
            .collect();
        AdjacencyDigraph {
            marks,
            labels,
            label_inverse,
            edges: all,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.marks.len()
    }

    fn audit_symmetry(&self) -> Result<()> {
        let set: HashSet<Edge> = self.edges.iter().copied().collect();
        for e in &self.edges {
            let li = self.label_inverse[e.label];
            if li == usize::MAX
                || !set.contains(&Edge {
                    from: e.to,
                    to: e.from,
                    label: li,
                })
            {
                return Err(Error::Precondition(format!(
                    "adjacency digraph lacks the reverse of edge {} -> {}",
                    e.from, e.to
                )));
            }
        }
        Ok(())
    }

    fn out_edges(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            out[e.from].push((e.to, e.label));
        }
        out
    }
}

/// Component id of each vertex, ignoring orientation.
pub fn digraph_components(d: &AdjacencyDigraph) -> Vec<usize> {
    let mut uf = UnionFind::new(d.vertex_count());
    for e in &d.edges {
        uf.union(e.from, e.to);
    }
    canonical_labels(&uf, d.vertex_count()).0
}

pub fn component_count(d: &AdjacencyDigraph) -> usize {
    digraph_components(d).into_iter().max().map_or(0, |m| m + 1)
}

/// Generators of `K_{v0}` and representatives `T_{v0,v1}`, as Y-words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanguageSummary {
    pub v0: usize,
    pub v1: usize,
    pub k_gens: Vec<Vec<u8>>,
    pub t_reps: Vec<Vec<u8>>,
}

impl LanguageSummary {
    /// `h ∈ K·t` for some `t`, decided by folding `K`. Exact when H is free on Y.
    pub fn contains(&self, h: &[u8]) -> bool {
        let g = fold(&self.k_gens);
        self.t_reps
            .iter()
            .any(|t| folded_member(&g, &y_product(h, t)))
    }
}

fn sort_dedup(mut v: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v.dedup();
    v
}

/// Exhaustive enumeration of simple paths from `v0` and the lollipop loops
/// they close. Errors once `budget` path extensions have been made.
pub fn language_summary(d: &AdjacencyDigraph, v0: usize, v1: usize, budget: usize) -> Result<LanguageSummary> {
    let out = d.out_edges();
    let mut k_gens = Vec::new();
    let mut t_reps = Vec::new();
    let mut steps = 0usize;
    // Stack of (vertex path, label word at each prefix).
    let mut path = vec![v0];
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut cursor = vec![0usize];
    if v0 == v1 {
        t_reps.push(Vec::new());
    }
    while let Some(top) = cursor.last_mut() {
        let u = *path.last().expect("path is nonempty");
        if *top >= out[u].len() {
            cursor.pop();
            path.pop();
            words.pop();
            continue;
        }
        let (w, l) = out[u][*top];
        *top += 1;
        steps += 1;
        if steps > budget {
            return Err(Error::CombinatorialBlowup(budget));
        }
        let label = &d.labels[l].y;
        let here = words.last().expect("words track path");
        let extended = reduce_y(here.iter().chain(label).copied().collect());
        if let Some(i) = path.iter().position(|&x| x == w) {
            // p[..i] · loop · p[..i]⁻¹
            let lolli = y_product(&extended, &words[i]);
            if !lolli.is_empty() {
                k_gens.push(lolli);
            }
            continue;
        }
        if w == v1 {
            t_reps.push(extended.clone());
        }
        path.push(w);
        words.push(extended);
        cursor.push(0);
    }
    Ok(LanguageSummary {
        v0,
        v1,
        k_gens: sort_dedup(k_gens),
        t_reps: sort_dedup(t_reps),
    })
}

/// Tree-path labels from `v0` (None outside its component) and the
/// generators of `K_{v0}`, one per edge of the component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningData {
    pub tree: Vec<Option<Vec<u8>>>,
    pub k_gens: Vec<Vec<u8>>,
}

pub fn spanning_data(d: &AdjacencyDigraph, v0: usize) -> SpanningData {
    let out = d.out_edges();
    let mut tree: Vec<Option<Vec<u8>>> = vec![None; d.vertex_count()];
    tree[v0] = Some(Vec::new());
    let mut queue = VecDeque::from([v0]);
    while let Some(u) = queue.pop_front() {
        for &(w, l) in &out[u] {
            if tree[w].is_none() {
                let t = tree[u].as_ref().expect("visited");
                tree[w] = Some(reduce_y(t.iter().chain(&d.labels[l].y).copied().collect()));
                queue.push_back(w);
            }
        }
    }
    let mut k_gens = Vec::new();
    for e in &d.edges {
        if let (Some(tu), Some(tw)) = (&tree[e.from], &tree[e.to]) {
            let gen = y_product(&reduce_y(tu.iter().chain(&d.labels[e.label].y).copied().collect()), tw);
            if !gen.is_empty() {
                k_gens.push(gen);
            }
        }
    }
    SpanningData {
        tree,
        k_gens: sort_dedup(k_gens),
    }
}

/// The same subgroup `K_{v0}` from a breadth-first spanning tree: one
/// generator per edge, and the single tree path as the representative of `T`.
pub fn spanning_summary(d: &AdjacencyDigraph, v0: usize, v1: usize) -> LanguageSummary {
    let data = spanning_data(d, v0);
    LanguageSummary {
        v0,
        v1,
        k_gens: data.k_gens,
        t_reps: data.tree[v1].iter().cloned().collect(),
    }
}

/// Deterministic DOT text with marked vertices doubled.
pub fn export_dot(d: &AdjacencyDigraph, p: &GroupPresentation) -> String {
    let mut s = String::from("digraph delta {\n");
    for (v, &m) in d.marks.iter().enumerate() {
        let shape = if m { "doublecircle" } else { "circle" };
        s.push_str(&format!("  v{v} [label=\"{v}\", marked={m}, shape={shape}];\n"));
    }
    for e in &d.edges {
        let w = crate::presentation::Word(free_reduce_letters(d.labels[e.label].g.iter().copied()));
        s.push_str(&format!("  v{} -> v{} [label=\"{}\"];\n", e.from, e.to, p.format(&w)));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constants::Rational;

    fn ctx_a() -> SubgroupContext {
        let p = Arc::new(GroupPresentation::free("f2", "ab").unwrap());
        SubgroupContext::new(p.clone(), vec![p.word("a").unwrap()], 0, Rational::from_integer(1), Rational::from_integer(0)).unwrap()
    }

    #[test]
    fn single_loop_and_single_edge() {
        let ctx = ctx_a();
        let p = ctx.presentation().clone();
        let s = ctx.element(vec![0]);
        let d = AdjacencyDigraph::from_parts(vec![true], vec![s.clone()], &[(0, 0, 0)], &p);
        let ls = language_summary(&d, 0, 0, 1000).unwrap();
        assert_eq!(ls.k_gens, vec![vec![0], vec![1]]);
        assert_eq!(ls.t_reps, vec![Vec::<u8>::new()]);

        let d = AdjacencyDigraph::from_parts(vec![false, false], vec![s], &[(0, 1, 0)], &p);
        let ls = language_summary(&d, 0, 1, 1000).unwrap();
        assert!(ls.k_gens.is_empty());
        assert_eq!(ls.t_reps, vec![vec![0]]);
        assert_eq!(component_count(&d), 1);
    }

    #[test]
    fn dot_shapes() {
        let p = GroupPresentation::free("f2", "ab").unwrap();
        let d = AdjacencyDigraph::from_parts(vec![false], Vec::new(), &[], &p);
        assert_eq!(export_dot(&d, &p).lines().count(), 3);
        let e = AdjacencyDigraph::from_parts(Vec::new(), Vec::new(), &[], &p);
        assert_eq!(export_dot(&e, &p), "digraph delta {\n}\n");
    }
}
