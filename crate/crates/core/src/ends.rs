//! Ends of the pair `e(G,H)`, filtered ends, finite index, and the action of
//! H on the components of the annular region.

use std::collections::{HashMap, HashSet};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::annulus::{build_cover, canonical_labels, grow_cover, FiniteCover};
use crate::cayley::{CayleyBall, Vertex};
use crate::constants::ConstantLedger;
use crate::digraph::{build_digraph, digraph_components, spanning_data, y_product, AdjacencyDigraph};
use crate::error::{Error, Result};
use crate::folding::{self, fold, folded_member};
use crate::subgroup::SubgroupContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// Generalised word problem: is `w` in the subgroup generated by `gens`?
/// Words are over the Y alphabet.
pub trait GwpOracle: Sync {
    fn name(&self) -> &'static str;
    fn is_exact(&self) -> bool;
    fn member(&self, ctx: &SubgroupContext, gens: &[Vec<u8>], w: &[u8]) -> Answer;
}

/// Stallings folding. Exact when H is free on Y.
#[derive(Clone, Copy, Debug, Default)]
pub struct FoldingOracle;

impl GwpOracle for FoldingOracle {
    fn name(&self) -> &'static str {
        "folding"
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn member(&self, _ctx: &SubgroupContext, gens: &[Vec<u8>], w: &[u8]) -> Answer {
        if folded_member(&fold(gens), w) {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

/// Products of at most `max_len` generators, compared in G. Never answers No.
#[derive(Clone, Copy, Debug)]
pub struct BoundedSearchOracle {
    pub max_len: usize,
    pub max_products: usize,
}

impl Default for BoundedSearchOracle {
    fn default() -> Self {
        BoundedSearchOracle {
            max_len: 4,
            max_products: 200_000,
        }
    }
}

impl GwpOracle for BoundedSearchOracle {
    fn name(&self) -> &'static str {
        "bounded"
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn member(&self, ctx: &SubgroupContext, gens: &[Vec<u8>], w: &[u8]) -> Answer {
        let target = ctx.element(folding::reduce(w.iter().copied()));
        let p = ctx.presentation();
        let mut sym: Vec<Vec<u8>> = gens.iter().flat_map(|g| [g.clone(), folding::inverse(g)]).collect();
        sym.sort();
        sym.dedup();
        let mut layer = vec![Vec::new()];
        let mut seen: HashSet<Vec<u8>> = HashSet::from([Vec::new()]);
        for _ in 0..=self.max_len {
            for y in &layer {
                if p.equal(&ctx.element(y.clone()).g, &target.g) {
                    return Answer::Yes;
                }
            }
            let mut next = Vec::new();
            for y in &layer {
                for s in &sym {
                    let z = folding::reduce(y.iter().chain(s).copied());
                    if seen.insert(z.clone()) {
                        next.push(z);
                    }
                }
                if seen.len() > self.max_products {
                    return Answer::Unknown;
                }
            }
            layer = next;
        }
        Answer::Unknown
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rung {
    pub r: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "R")]
    pub big_r: usize,
    pub cover_vertices: usize,
    pub cover_components: usize,
    pub marked_components: usize,
    /// `None` when no component is marked and the digraph was skipped.
    pub adjacency_labels: Option<usize>,
    pub e_pair: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Filtered {
    Finite(usize),
    AtLeast(usize),
    BudgetExhausted,
    NotComputed,
}

#[derive(Clone, Debug, Serialize)]
pub struct EndsReport {
    /// Present only when the ladder stabilized.
    pub e_pair: Option<usize>,
    pub upper_bound: usize,
    pub filtered: Filtered,
    pub stabilization: Vec<Rung>,
    pub stabilized: bool,
    pub finite_index: bool,
    pub constants: ConstantLedger,
    pub budget_spent: usize,
}

/// Count Δ_F components containing a marked vertex for one triple.
pub fn rung(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger) -> Result<Rung> {
    let f = build_cover(b, ctx, c, 0)?;
    let marked_components = f.marked.iter().filter(|&&m| m).count();
    // With nothing marked there is nothing to count.
    let (labels, e_pair) = if marked_components == 0 {
        (None, 0)
    } else {
        let d = build_digraph(&f, ctx, b)?;
        let comps = digraph_components(&d);
        let marked: HashSet<usize> = (0..d.vertex_count()).filter(|&v| d.marks[v]).map(|v| comps[v]).collect();
        (Some(d.labels.len()), marked.len())
    };
    Ok(Rung {
        r: c.r(),
        k: c.k(),
        big_r: c.big_r(),
        cover_vertices: f.len(),
        cover_components: f.component_count(),
        marked_components,
        adjacency_labels: labels,
        e_pair,
    })
}

/// The ledger triple followed by its double.
pub fn default_ladder(c: &ConstantLedger) -> Vec<(usize, usize, usize)> {
    vec![(c.r(), c.k(), c.big_r()), (2 * c.r(), 2 * c.k(), 2 * c.big_r())]
}

pub fn upper_bound(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger) -> Result<usize> {
    let n = 2 * ctx.l() + c.big_r();
    b.require_radius("ball B_{2l+R}(1)", n)?;
    Ok(b.ball(n).len())
}

pub fn ends_of_pair(
    b: &CayleyBall,
    ctx: &SubgroupContext,
    c: &ConstantLedger,
    ladder: &[(usize, usize, usize)],
) -> Result<EndsReport> {
    if ladder.is_empty() {
        return Err(Error::Domain("empty ladder".into()));
    }
    let mut rungs = Vec::new();
    for &(r, k, big_r) in ladder {
        let lc = c.with_triple(r as i64, k as i64, big_r as i64)?;
        rungs.push(rung(b, ctx, &lc)?);
    }
    let stabilized = rungs.len() >= 2 && rungs[rungs.len() - 1].e_pair == rungs[rungs.len() - 2].e_pair;
    let finite_index = is_finite_index(b, ctx, c)?;
    Ok(EndsReport {
        e_pair: stabilized.then(|| rungs[rungs.len() - 1].e_pair),
        upper_bound: upper_bound(b, ctx, c)?,
        filtered: Filtered::NotComputed,
        stabilization: rungs,
        stabilized,
        finite_index,
        constants: c.clone(),
        budget_spent: ladder.len(),
    })
}

/// Finite index iff the cover at the identity misses `C_K(H)`.
pub fn is_finite_index(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger) -> Result<bool> {
    let f = build_cover(b, ctx, c, 0)?;
    Ok(!f.marked.iter().any(|&m| m))
}

/// `F_0`: the part of the cover at the identity lying in `A_{r,R,K}(H)`.
pub fn initial_region(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger) -> Result<FiniteCover> {
    let f = build_cover(b, ctx, c, 0)?;
    if !f.marked.iter().any(|&m| m) {
        return Ok(f.restrict(b, &vec![false; f.component_count()]));
    }
    let d = build_digraph(&f, ctx, b)?;
    let comps = digraph_components(&d);
    let marked: HashSet<usize> = (0..d.vertex_count()).filter(|&v| d.marks[v]).map(|v| comps[v]).collect();
    let keep: Vec<bool> = comps.iter().map(|c| marked.contains(c)).collect();
    Ok(f.restrict(b, &keep))
}

/// Classes of cover components lying in the same component of `HF`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classes {
    /// Class of each cover component.
    pub of_component: Vec<usize>,
    pub count: usize,
    pub exact: bool,
    pub unknown: bool,
}

/// Two components `v, w` in one Δ-component with tree paths `t_v, t_w` lie in
/// the same component of `HF` iff `t_v t_w⁻¹ ∈ K_{v0}`.
pub fn component_classes(d: &AdjacencyDigraph, ctx: &SubgroupContext, oracle: &dyn GwpOracle) -> Classes {
    let comps = digraph_components(d);
    let n = d.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut unknown = false;
    let mut done = vec![false; n];
    for v0 in 0..n {
        if done[v0] {
            continue;
        }
        let data = spanning_data(d, v0);
        let members: Vec<usize> = (0..n).filter(|&v| comps[v] == comps[v0]).collect();
        let mut reps: Vec<usize> = Vec::new();
        for &v in &members {
            done[v] = true;
            let tv = data.tree[v].as_ref().expect("same component");
            let mut placed = false;
            for &r in &reps {
                let tr = data.tree[r].as_ref().expect("same component");
                match oracle.member(ctx, &data.k_gens, &y_product(tv, tr)) {
                    Answer::Yes => {
                        uf.union(v, r);
                        placed = true;
                        break;
                    }
                    Answer::No => {}
                    Answer::Unknown => unknown = true,
                }
            }
            if !placed {
                reps.push(v);
            }
        }
    }
    let (of_component, count) = canonical_labels(&uf, n);
    Classes {
        of_component,
        count,
        exact: oracle.is_exact() && !unknown,
        unknown,
    }
}
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generation {
    pub generation: usize,
    pub vertices: usize,
    pub components: usize,
    /// Classes meeting `F_i`.
    pub distinct: usize,
    /// Classes of `F_{i+1}` that miss `F_i`.
    pub new_classes: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FilteredReport {
    pub filtered: Filtered,
    pub generations: Vec<Generation>,
    pub oracle: &'static str,
    pub exact: bool,
    pub budget_spent: usize,
}

fn count_distinct(f: &FiniteCover, ctx: &SubgroupContext, b: &CayleyBall, oracle: &dyn GwpOracle) -> Result<Classes> {
    let d = build_digraph(f, ctx, b)?;
    Ok(component_classes(&d, ctx, oracle))
}

/// Classes of `next` meeting `f`, and the number of classes that do not.
fn split_classes(f: &FiniteCover, next: &FiniteCover, classes: &Classes) -> (usize, usize) {
    let old: HashSet<usize> = f
        .points
        .iter()
        .filter_map(|p| next.component_of(p.vertex))
        .map(|c| classes.of_component[c])
        .collect();
    (old.len(), classes.count - old.len())
}

/// Growing-cover semi-decision of `ẽ(G,H) < ∞`. `budget` bounds the number
/// of generations.
///
/// Since `H F_0 = A_{r,R,K}(H)`, a component of `Y F_i` joins `F_i` through
/// `A_{r,R,K}(H)` exactly when its class in `F_{i+1}` already meets `F_i`.
pub fn filtered_ends(
    b: &CayleyBall,
    ctx: &SubgroupContext,
    c: &ConstantLedger,
    budget: usize,
    oracle: &dyn GwpOracle,
) -> Result<FilteredReport> {
    let mut f = initial_region(b, ctx, c)?;
    let mut gens = Vec::new();
    if f.is_empty() {
        return Ok(FilteredReport {
            filtered: Filtered::Finite(0),
            generations: gens,
            oracle: oracle.name(),
            exact: true,
            budget_spent: 0,
        });
    }
    for i in 0..budget {
        let next = grow_cover(&f, ctx, b)?;
        let classes = count_distinct(&next, ctx, b, oracle)?;
        let (distinct, new_classes) = split_classes(&f, &next, &classes);
        gens.push(Generation {
            generation: i,
            vertices: f.len(),
            components: f.component_count(),
            distinct,
            new_classes,
            exact: classes.exact,
        });
        if new_classes == 0 && !classes.unknown {
            return Ok(FilteredReport {
                filtered: Filtered::Finite(distinct),
                generations: gens,
                oracle: oracle.name(),
                exact: classes.exact,
                budget_spent: i + 1,
            });
        }
        f = next;
    }
    Ok(FilteredReport {
        filtered: Filtered::BudgetExhausted,
        generations: gens,
        oracle: oracle.name(),
        exact: false,
        budget_spent: budget,
    })
}

/// Decide `ẽ(G,H) >= n` from the counts `N_i` of distinct components meeting `F_i`.
pub fn filtered_ends_at_least(
    b: &CayleyBall,
    ctx: &SubgroupContext,
    c: &ConstantLedger,
    n: usize,
    oracle: &dyn GwpOracle,
    budget: usize,
) -> Result<(Answer, Vec<usize>)> {
    if n == 0 {
        return Ok((Answer::Yes, Vec::new()));
    }
    let mut f = initial_region(b, ctx, c)?;
    let mut counts: Vec<usize> = Vec::new();
    let mut exact = true;
    for _ in 0..=budget {
        let classes = count_distinct(&f, ctx, b, oracle)?;
        if classes.unknown {
            return Ok((Answer::Unknown, counts));
        }
        exact &= classes.exact;
        counts.push(classes.count);
        if classes.count >= n {
            return Ok((Answer::Yes, counts));
        }
        if counts.len() >= 2 && counts[counts.len() - 1] == counts[counts.len() - 2] {
            return Ok((if exact { Answer::No } else { Answer::Unknown }, counts));
        }
        if f.is_empty() {
            return Ok((if exact { Answer::No } else { Answer::Unknown }, counts));
        }
        f = grow_cover(&f, ctx, b)?;
    }
    Ok((Answer::Unknown, counts))
}

/// Permutation action of Y on components and generators of its kernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentAction {
    /// `permutations[y][c]` is the image of component `c` under generator `y`.
    pub permutations: Vec<Vec<usize>>,
    /// Index of the kernel H′ in H.
    pub index: usize,
    /// Schreier generators of H′ as Y-words.
    pub kernel_generators: Vec<Vec<u8>>,
}

/// Kernel of the action of the free group on `perms.len()` letters given by
/// the permutations, via a Schreier transversal of the image group.
pub fn action_kernel(perms: Vec<Vec<usize>>) -> ComponentAction {
    let n = perms.first().map_or(0, Vec::len);
    let identity: Vec<usize> = (0..n).collect();
    let letters: Vec<(u8, Vec<usize>)> = perms
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            let mut inv = vec![0; n];
            for (a, &b) in p.iter().enumerate() {
                inv[b] = a;
            }
            [(2 * i as u8, p.clone()), (2 * i as u8 + 1, inv)]
        })
        .collect();
    let compose = |g: &Vec<usize>, s: &Vec<usize>| -> Vec<usize> { g.iter().map(|&x| s[x]).collect() };
    let mut transversal: HashMap<Vec<usize>, Vec<u8>> = HashMap::from([(identity.clone(), Vec::new())]);
    let mut order = vec![identity];
    let mut i = 0;
    while i < order.len() {
        let g = order[i].clone();
        for (x, s) in &letters {
            let h = compose(&g, s);
            if !transversal.contains_key(&h) {
                let mut w = transversal[&g].clone();
                w.push(*x);
                transversal.insert(h.clone(), w);
                order.push(h);
            }
        }
        i += 1;
    }
    let mut kernel = Vec::new();
    for g in &order {
        for (x, s) in letters.iter().filter(|(x, _)| x % 2 == 0) {
            let h = compose(g, s);
            let mut w = transversal[g].clone();
            w.push(*x);
            let z = folding::reduce(w.into_iter().chain(folding::inverse(&transversal[&h])));
            if !z.is_empty() {
                kernel.push(z);
            }
        }
    }
    kernel.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    kernel.dedup();
    ComponentAction {
        permutations: perms,
        index: order.len(),
        kernel_generators: kernel,
    }
}

/// How each generator of H permutes the components of `A_{r,R,K}(H)`.
pub fn component_action(
    b: &CayleyBall,
    ctx: &SubgroupContext,
    c: &ConstantLedger,
    oracle: &dyn GwpOracle,
    budget: usize,
) -> Result<ComponentAction> {
    let report = filtered_ends(b, ctx, c, budget, oracle)?;
    let Filtered::Finite(n) = report.filtered else {
        return Err(Error::Precondition("component action needs finitely many filtered ends".into()));
    };
    let y_count = ctx.generators().len();
    if n <= 1 {
        return Ok(action_kernel(vec![vec![0; n]; y_count.max(1)]));
    }
    let mut f = initial_region(b, ctx, c)?;
    for _ in 0..report.budget_spent.saturating_sub(1) {
        f = grow_cover(&f, ctx, b)?;
    }
    let next = grow_cover(&f, ctx, b)?;
    let d = build_digraph(&next, ctx, b)?;
    let classes = component_classes(&d, ctx, oracle);
    // Number the classes meeting F_i by first appearance.
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut rep_point: Vec<Vertex> = Vec::new();
    for p in &f.points {
        let i = next.position(p.vertex).expect("F_i lies in F_(i+1)");
        let class = classes.of_component[next.component[i]];
        if let std::collections::hash_map::Entry::Vacant(e) = ids.entry(class) {
            e.insert(rep_point.len());
            rep_point.push(p.vertex);
        }
    }
    let mut perms = Vec::new();
    for y in 0..y_count {
        let word = &ctx.y_letters()[2 * y];
        let mut perm = Vec::new();
        for &x in &rep_point {
            let v = b
                .translate(x, word)
                .ok_or_else(|| Error::radius("component action", b.layer(x) + word.len(), b.radius()))?;
            let i = next
                .position(v)
                .ok_or_else(|| Error::Precondition("translate left the grown cover".into()))?;
            let class = classes.of_component[next.component[i]];
            perm.push(*ids.get(&class).ok_or_else(|| Error::Precondition("class misses F_i".into()))?);
        }
        perms.push(perm);
    }
    Ok(action_kernel(perms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_has_index_two_kernel() {
        let a = action_kernel(vec![vec![1, 0]]);
        assert_eq!(a.index, 2);
        assert_eq!(a.kernel_generators, vec![vec![0, 0]]);
    }

    #[test]
    fn identity_action_keeps_generators() {
        let a = action_kernel(vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(a.index, 1);
        assert_eq!(a.kernel_generators, vec![vec![0], vec![2]]);
    }
}
