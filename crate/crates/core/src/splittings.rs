//! Commensurator membership, crossing witnesses between H-almost invariant
//! sets, candidate splittings, and the two-track splitting decision.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::annulus::{build_cover, FiniteCover};
use crate::cayley::{CayleyBall, Vertex};
use crate::constants::ConstantLedger;
use crate::digraph::{build_digraph, digraph_components};
use crate::ends::{component_action, Answer, GwpOracle};
use crate::error::{Error, Result};
use crate::presentation::{free_reduce_letters, Letter, Word};
use crate::subgroup::{is_member_letters, project, Projection, SubgroupContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member,
    NonMember,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommVerdict {
    pub g: String,
    pub verdict: Membership,
    /// Nontrivial elements of `H ∩ H^g` met during the count.
    pub intersection: Vec<String>,
    /// Coset counts `|H_m : K|` and `|H^g_m : K|` for each enumeration radius `m`.
    pub trace: Vec<CosetCount>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetCount {
    pub m: usize,
    pub elements: usize,
    pub in_h: usize,
    pub in_conjugate: usize,
}

fn conj(g: &[Letter], w: &[Letter]) -> Vec<Letter> {
    // g⁻¹ w g
    let gi = g.iter().rev().map(|x| x.inverse());
    free_reduce_letters(gi.chain(w.iter().copied()).chain(g.iter().copied()))
}

fn inverse(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|x| x.inverse()).collect()
}

/// Reduced Y-words of length at most `m`, as G-words.
fn h_ball(ctx: &SubgroupContext, m: usize, cap: usize) -> Option<Vec<Vec<Letter>>> {
    let k = ctx.y_letters().len() as u8;
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    let mut all = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for y in &layer {
            for s in 0..k {
                if y.last() == Some(&(s ^ 1)) {
                    continue;
                }
                let mut z = y.clone();
                z.push(s);
                next.push(z);
            }
        }
        all.extend(next.iter().map(|y| ctx.element(y.clone()).g));
        if all.len() > cap {
            return None;
        }
        layer = next;
    }
    Some(all)
}

/// Count right cosets of `K` among `elements`, where `same(u, v)` decides
/// `u v⁻¹ ∈ K`. `None` when a membership call fails.
fn coset_count(elements: &[Vec<Letter>], same: impl Fn(&[Letter]) -> Result<bool>) -> Result<(usize, Vec<Vec<Letter>>)> {
    let mut reps: Vec<&Vec<Letter>> = Vec::new();
    let mut inside = Vec::new();
    for e in elements {
        let mut placed = false;
        for r in &reps {
            let q: Vec<Letter> = free_reduce_letters(e.iter().copied().chain(inverse(r)));
            if same(&q)? {
                if !q.is_empty() {
                    inside.push(q);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            reps.push(e);
        }
    }
    Ok((reps.len(), inside))
}

/// Decide `g ∈ Comm_G(H)` by coset counts of `K = H ∩ H^g` in growing balls of
/// H and of `H^g`, over radii `1, 2, 4, ...` up to `max_m`.
///
/// Member when both counts agree over two consecutive doublings. NonMember
/// when every count so far has grown strictly and K met no nontrivial element.
pub fn commensurator_member(ctx: &SubgroupContext, g: &Word, max_m: usize, cap: usize) -> CommVerdict {
    let p = ctx.presentation();
    let gl = free_reduce_letters(g.letters().iter().copied());
    let mut verdict = CommVerdict {
        g: p.format(&Word(gl.clone())),
        verdict: Membership::Unknown,
        intersection: Vec::new(),
        trace: Vec::new(),
    };
    match is_member_letters(ctx, &gl) {
        Ok(true) => {
            verdict.verdict = Membership::Member;
            return verdict;
        }
        Ok(false) => {}
        Err(_) => return verdict,
    }
    let mut m = 1;
    let mut found = Vec::new();
    while m <= max_m {
        let Some(elements) = h_ball(ctx, m, cap) else { break };
        // u v⁻¹ ∈ K with u, v ∈ H iff g u v⁻¹ g⁻¹ ∈ H.
        let in_h = coset_count(&elements, |q| is_member_letters(ctx, &conj(&inverse(&gl), q)));
        // Conjugates g⁻¹ h g: their quotients lie in K iff they lie in H.
        let conjugates: Vec<Vec<Letter>> = elements.iter().map(|e| conj(&gl, e)).collect();
        let in_conj = coset_count(&conjugates, |q| is_member_letters(ctx, q));
        let (Ok((a, ka)), Ok((c, kc))) = (in_h, in_conj) else { break };
        found.extend(ka);
        found.extend(kc);
        verdict.trace.push(CosetCount {
            m,
            elements: elements.len(),
            in_h: a,
            in_conjugate: c,
        });
        let t = &verdict.trace;
        if t.len() >= 3 {
            let last = &t[t.len() - 3..];
            if last.iter().all(|x| x.in_h == last[0].in_h && x.in_conjugate == last[0].in_conjugate) {
                verdict.verdict = Membership::Member;
                break;
            }
        }
        m *= 2;
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    found.dedup();
    verdict.intersection = found.iter().take(8).map(|w| p.format(&Word(w.clone()))).collect();
    let t = &verdict.trace;
    if verdict.verdict == Membership::Unknown
        && t.len() >= 3
        && found.is_empty()
        && t.windows(2).all(|w| w[1].in_h > w[0].in_h && w[1].in_conjugate > w[0].in_conjugate)
    {
        verdict.verdict = Membership::NonMember;
    }
    verdict
}

/// Distance to H and side class of each ball vertex beyond `K`.
#[derive(Clone, Debug)]
pub struct SideTable {
    pub radius: usize,
    pub k: usize,
    /// `d(x, H)` for every vertex of the ball of the given radius.
    pub dist: Vec<usize>,
    /// Class of the component of `A_{r,R,K}(H)` containing the point at
    /// distance `K` on the shortest path from H to `x`; `None` when `d(x,H) <= K`.
    pub class: Vec<Option<usize>>,
    pub class_count: usize,
}

/// Classes are the Δ-components of the cover at the identity that contain a
/// marked vertex, numbered by first appearance.
pub fn side_table(b: &CayleyBall, ctx: &SubgroupContext, c: &ConstantLedger, radius: usize) -> Result<SideTable> {
    b.require_radius("side table", radius)?;
    let f = build_cover(b, ctx, c, 0)?;
    let d = build_digraph(&f, ctx, b)?;
    let comps = digraph_components(&d);
    let mut ids: HashMap<usize, usize> = HashMap::new();
    for v in 0..d.vertex_count() {
        if d.marks[v] {
            let next = ids.len();
            ids.entry(comps[v]).or_insert(next);
        }
    }
    let class_of = |p: Vertex, cover: &FiniteCover| -> Option<usize> {
        cover.component_of(p).and_then(|comp| ids.get(&comps[comp]).copied())
    };
    let k = c.k();
    let rows: Vec<Result<(usize, Option<usize>)>> = b
        .ball(radius)
        .into_par_iter()
        .map(|x| {
            let Projection::Within { dist, rep, .. } = project(ctx, b, x, b.layer(x))? else {
                unreachable!("the identity lies in H")
            };
            if dist <= k {
                return Ok((dist, None));
            }
            let prefix = &b.rep_letters(rep)[..k];
            let p = b.locate_letters(prefix.iter().copied()).expect("prefix of a ball vertex");
            Ok((dist, class_of(p, &f)))
        })
        .collect();
    let mut dist = Vec::with_capacity(rows.len());
    let mut class = Vec::with_capacity(rows.len());
    for r in rows {
        let (d, cl) = r?;
        dist.push(d);
        class.push(cl);
    }
    Ok(SideTable {
        radius,
        k,
        dist,
        class,
        class_count: ids.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pattern {
    /// `U ∩ gU`
    InIn,
    /// `U ∩ gU*`
    InOut,
    /// `U* ∩ gU`
    OutIn,
    /// `U* ∩ gU*`
    OutOut,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [Pattern::InIn, Pattern::InOut, Pattern::OutIn, Pattern::OutOut];

    fn of(in_u: bool, in_gu: bool) -> Pattern {
        match (in_u, in_gu) {
            (true, true) => Pattern::InIn,
            (true, false) => Pattern::InOut,
            (false, true) => Pattern::OutIn,
            (false, false) => Pattern::OutOut,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub pattern: Pattern,
    pub vertex: Vertex,
    pub word: String,
    pub dist_h: usize,
    pub dist_gh: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingCertificate {
    pub g: String,
    pub g_len: usize,
    pub u: Vec<usize>,
    /// `d(x, H)` must exceed this.
    pub threshold_h: usize,
    /// `d(x, gH)` must exceed this: `max(K + 5δ + |g|, r + pad·|g|)`.
    pub threshold_gh: usize,
    pub r_g: usize,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossingOutcome {
    Found(CrossingCertificate),
    NotFound { partial: CrossingCertificate, scanned: usize },
}

/// Thresholds for a given `g`.
pub fn thresholds(c: &ConstantLedger, g_len: usize, pad: usize) -> (usize, usize, usize) {
    let r_g = c.r() + pad * g_len;
    let base = c.k() as i64 + 5 * c.delta + g_len as i64;
    (c.k(), (base.max(0) as usize).max(r_g), r_g)
}

/// For one `g`: the first scanned vertex `x` for each pair of classes
/// (class of `x`, class of `g⁻¹x`) among points far from both H and gH.
#[derive(Clone, Debug)]
pub struct ClassPairs {
    pub g: String,
    pub g_len: usize,
    pub threshold_h: usize,
    pub threshold_gh: usize,
    pub r_g: usize,
    /// `(class x, class g⁻¹x) -> (x, d(x, gH))`.
    pub first: BTreeMap<(usize, usize), (Vertex, usize)>,
    pub scanned: usize,
}

pub fn class_pairs(b: &CayleyBall, t: &SideTable, c: &ConstantLedger, g: &Word, pad: usize) -> ClassPairs {
    let p = b.presentation();
    let gl = free_reduce_letters(g.letters().iter().copied());
    let g_len = b.locate_letters(gl.iter().copied()).map_or(gl.len(), |v| b.layer(v));
    let (th, tgh, r_g) = thresholds(c, g_len, pad);
    let gi: Vec<Letter> = inverse(&gl);
    let range = b.ball(t.radius);
    let hits: Vec<Option<((usize, usize), Vertex, usize)>> = range
        .clone()
        .into_par_iter()
        .map(|x| {
            let (dx, cx) = (t.dist[x as usize], t.class[x as usize]?);
            if dx <= th {
                return None;
            }
            let y = b.locate_letters(gi.iter().copied().chain(b.rep_letters(x)))?;
            let (dy, cy) = (*t.dist.get(y as usize)?, t.class[y as usize]?);
            (dy > tgh).then_some(((cx, cy), x, dy))
        })
        .collect();
    let mut first = BTreeMap::new();
    for (key, x, dy) in hits.into_iter().flatten() {
        first.entry(key).or_insert((x, dy));
    }
    ClassPairs {
        g: p.format(&Word(gl)),
        g_len,
        threshold_h: th,
        threshold_gh: tgh,
        r_g,
        first,
        scanned: range.len(),
    }
}

/// The earliest witness of each pattern for the union `u`.
pub fn certificate_for(b: &CayleyBall, t: &SideTable, pairs: &ClassPairs, u: &[usize]) -> Result<CrossingOutcome> {
    let mut in_u = vec![false; t.class_count];
    for &i in u {
        if i >= t.class_count {
            return Err(Error::Domain(format!("class {i} out of range")));
        }
        in_u[i] = true;
    }
    let mut best: BTreeMap<Pattern, (Vertex, usize)> = BTreeMap::new();
    for (&(cx, cy), &(x, dy)) in &pairs.first {
        let e = best.entry(Pattern::of(in_u[cx], in_u[cy])).or_insert((x, dy));
        if x < e.0 {
            *e = (x, dy);
        }
    }
    let p = b.presentation();
    let witnesses = best
        .into_iter()
        .map(|(pattern, (x, dy))| Witness {
            pattern,
            vertex: x,
            word: p.format(&b.rep(x)),
            dist_h: t.dist[x as usize],
            dist_gh: dy,
        })
        .collect::<Vec<_>>();
    let cert = CrossingCertificate {
        g: pairs.g.clone(),
        g_len: pairs.g_len,
        u: u.to_vec(),
        threshold_h: pairs.threshold_h,
        threshold_gh: pairs.threshold_gh,
        r_g: pairs.r_g,
        witnesses,
    };
    Ok(if cert.witnesses.len() == 4 {
        CrossingOutcome::Found(cert)
    } else {
        CrossingOutcome::NotFound {
            partial: cert,
            scanned: pairs.scanned,
        }
    })
}

/// Scan ball vertices in increasing order for the four patterns of
/// `U, U*` against `gU, gU*`.
pub fn crossing_witness(
    b: &CayleyBall,
    t: &SideTable,
    c: &ConstantLedger,
    u: &[usize],
    g: &Word,
    pad: usize,
) -> Result<CrossingOutcome> {
    certificate_for(b, t, &class_pairs(b, t, c, g, pad), u)
}

/// Recompute both distances of every witness from scratch.
pub fn revalidate(b: &CayleyBall, ctx: &SubgroupContext, cert: &CrossingCertificate) -> Result<bool> {
    let p = b.presentation();
    let g = p.word(&cert.g)?;
    for w in &cert.witnesses {
        let x = b.locate(&p.word(&w.word)?).ok_or_else(|| Error::Precondition("witness outside the ball".into()))?;
        let dh = crate::subgroup::distance_to_subgroup(ctx, b, x)?;
        let gx: Vec<Letter> = inverse(g.letters()).into_iter().chain(b.rep_letters(x)).collect();
        let dgh = match crate::subgroup::project_letters(ctx, b, &gx, b.radius())? {
            Projection::Within { dist, .. } => dist,
            Projection::Beyond(_) => return Ok(false),
        };
        if dh != w.dist_h || dgh != w.dist_gh || dh <= cert.threshold_h || dgh <= cert.threshold_gh {
            return Ok(false);
        }
    }
    Ok(cert.witnesses.len() == 4)
}

/// Nontrivial unions of classes up to complement: those containing class 0.
pub fn class_unions(n: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return Vec::new();
    }
    (0u64..1 << (n - 1))
        .map(|mask| mask << 1 | 1)
        .filter(|&set| set != (1u64 << n) - 1)
        .map(|set| (0..n).filter(|i| set >> i & 1 == 1).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionProgress {
    pub u: Vec<usize>,
    pub certificate: Option<CrossingCertificate>,
    /// Patterns seen for the best `g` so far.
    pub best_patterns: Vec<Pattern>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossingsResult {
    /// Every nontrivial union has a certificate.
    AllCrossed,
    /// There is no nontrivial union.
    NoAlmostInvariantSet,
    BudgetExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingsReport {
    pub result: CrossingsResult,
    pub progress: Vec<UnionProgress>,
    pub elements_tried: usize,
    pub skipped_commensurator: Vec<String>,
    pub budget_spent: usize,
}

/// Resumable search over `g` by layer, skipping commensurator members.
pub struct CrossingSearch<'a> {
    b: &'a CayleyBall,
    ctx: &'a SubgroupContext,
    c: &'a ConstantLedger,
    table: SideTable,
    pad: usize,
    next_g: Vertex,
    max_g: Vertex,
    progress: Vec<UnionProgress>,
    skipped: Vec<String>,
    tried: usize,
}

impl<'a> CrossingSearch<'a> {
    /// `scan_radius` bounds the witness scan and `g_radius` the layers of `g`.
    pub fn new(
        b: &'a CayleyBall,
        ctx: &'a SubgroupContext,
        c: &'a ConstantLedger,
        scan_radius: usize,
        g_radius: usize,
        pad: usize,
    ) -> Result<Self> {
        let table = side_table(b, ctx, c, scan_radius)?;
        let progress = class_unions(table.class_count)
            .into_iter()
            .map(|u| UnionProgress {
                u,
                certificate: None,
                best_patterns: Vec::new(),
            })
            .collect();
        Ok(CrossingSearch {
            b,
            ctx,
            c,
            table,
            pad,
            next_g: 1,
            max_g: b.ball(g_radius.min(b.radius())).end,
            progress,
            skipped: Vec::new(),
            tried: 0,
        })
    }

    pub fn is_done(&self) -> bool {
        self.progress.iter().all(|p| p.certificate.is_some())
    }

    pub fn is_exhausted(&self) -> bool {
        self.next_g >= self.max_g
    }

    /// Try up to `slice` further elements `g`.
    pub fn step(&mut self, slice: usize) -> Result<()> {
        let mut used = 0;
        while used < slice && !self.is_done() && !self.is_exhausted() {
            let g = self.b.rep(self.next_g);
            self.next_g += 1;
            used += 1;
            if commensurator_member(self.ctx, &g, 4, 20_000).verdict == Membership::Member {
                self.skipped.push(self.b.presentation().format(&g));
                continue;
            }
            self.tried += 1;
            let pairs = class_pairs(self.b, &self.table, self.c, &g, self.pad);
            for prog in self.progress.iter_mut().filter(|p| p.certificate.is_none()) {
                match certificate_for(self.b, &self.table, &pairs, &prog.u)? {
                    CrossingOutcome::Found(cert) => prog.certificate = Some(cert),
                    CrossingOutcome::NotFound { partial, .. } => {
                        if partial.witnesses.len() > prog.best_patterns.len() {
                            prog.best_patterns = partial.witnesses.iter().map(|w| w.pattern).collect();
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn report(&self) -> CrossingsReport {
        let result = if self.progress.is_empty() {
            CrossingsResult::NoAlmostInvariantSet
        } else if self.is_done() {
            CrossingsResult::AllCrossed
        } else {
            CrossingsResult::BudgetExhausted
        };
        CrossingsReport {
            result,
            progress: self.progress.clone(),
            elements_tried: self.tried,
            skipped_commensurator: self.skipped.clone(),
            budget_spent: (self.next_g - 1) as usize,
        }
    }
}

pub fn crossings_search(
    b: &CayleyBall,
    ctx: &SubgroupContext,
    c: &ConstantLedger,
    scan_radius: usize,
    g_radius: usize,
    pad: usize,
    budget: usize,
) -> Result<CrossingsReport> {
    let mut s = CrossingSearch::new(b, ctx, c, scan_radius, g_radius, pad)?;
    s.step(budget)?;
    Ok(s.report())
}

/// Whether the subgroup generated by `candidate` is commensurable with H,
/// via `H′ ≤ Comm_G(H)` and `H ≤ Comm_G(H′)`.
pub fn verify_candidate_splitting(ctx: &SubgroupContext, candidate: &[Word], max_m: usize, cap: usize) -> Result<(Answer, Vec<CommVerdict>)> {
    let other = SubgroupContext::new(
        ctx.shared_presentation(),
        candidate.to_vec(),
        ctx.q(),
        ctx.lambda(),
        ctx.epsilon(),
    )?;
    let mut verdicts = Vec::new();
    for g in candidate {
        verdicts.push(commensurator_member(ctx, g, max_m, cap));
    }
    for g in ctx.generators() {
        verdicts.push(commensurator_member(&other, g, max_m, cap));
    }
    let answer = if verdicts.iter().any(|v| v.verdict == Membership::NonMember) {
        Answer::No
    } else if verdicts.iter().all(|v| v.verdict == Membership::Member) {
        Answer::Yes
    } else {
        Answer::Unknown
    };
    Ok((answer, verdicts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplitMode {
    FiniteFiltered,
    Lonely,
    NotLonely,
}

impl std::str::FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite-filtered" | "finite_filtered" => Ok(SplitMode::FiniteFiltered),
            "lonely" => Ok(SplitMode::Lonely),
            "not-lonely" | "not_lonely" => Ok(SplitMode::NotLonely),
            _ => Err(Error::Domain(format!("unknown split mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateResult {
    pub generators: Vec<String>,
    pub commensurable: Answer,
    pub verdicts: Vec<CommVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conclusion {
    /// Track A verified a candidate.
    AssociatedWithSplitting { candidate: usize },
    /// Track B certified a crossing for every nontrivial union.
    NotAssociated,
    /// Track B found no nontrivial H-almost invariant set at these constants.
    NoAlmostInvariantSet,
    BudgetExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub mode: SplitMode,
    /// Generators of the subgroup track B ran on.
    pub searched_subgroup: Vec<String>,
    pub preprocessing: Vec<String>,
    pub track_a: Vec<CandidateResult>,
    pub track_b: Option<CrossingsReport>,
    pub conclusion: Conclusion,
    pub slices: usize,
}

#[derive(Clone, Debug)]
pub struct SplitInputs {
    pub mode: SplitMode,
    pub candidates: Vec<Vec<Word>>,
    pub comm_element: Option<Word>,
    pub finite_index_subgroup: Option<Vec<Word>>,
    pub pad: usize,
    pub scan_radius: usize,
    pub g_radius: usize,
    /// Number of round-robin slices.
    pub budget: usize,
    /// Elements `g` tried per slice of track B.
    pub slice: usize,
}

/// Alternate candidate verification (track A) and the crossing search
/// (track B) in fixed slices until one concludes or the budget ends.
pub fn split_decision(
    b: &CayleyBall,
    ctx: &SubgroupContext,
    c: &ConstantLedger,
    inputs: &SplitInputs,
    oracle: &dyn GwpOracle,
) -> Result<SplitReport> {
    let p = ctx.presentation();
    let fmt = |ws: &[Word]| ws.iter().map(|w| p.format(w)).collect::<Vec<_>>();
    let mut preprocessing = Vec::new();
    let searched: Option<Arc<SubgroupContext>> = match inputs.mode {
        SplitMode::Lonely => None,
        SplitMode::FiniteFiltered => {
            let action = component_action(b, ctx, c, oracle, inputs.budget.max(1))?;
            preprocessing.push(format!("component action index {}", action.index));
            if action.index == 1 {
                None
            } else {
                let gens = action
                    .kernel_generators
                    .iter()
                    .map(|y| ctx.element(y.clone()).word())
                    .collect();
                Some(Arc::new(SubgroupContext::new(
                    ctx.shared_presentation(),
                    gens,
                    ctx.q(),
                    ctx.lambda(),
                    ctx.epsilon(),
                )?))
            }
        }
        SplitMode::NotLonely => {
            if let Some(g) = &inputs.comm_element {
                let v = commensurator_member(ctx, g, 8, 50_000);
                let in_h = is_member_letters(ctx, g.letters())?;
                preprocessing.push(format!("commensurator element {}: {:?}, in H: {in_h}", p.format(g), v.verdict));
            }
            match &inputs.finite_index_subgroup {
                Some(gens) => {
                    let (ans, _) = verify_candidate_splitting(ctx, gens, 8, 50_000)?;
                    preprocessing.push(format!("finite-index subgroup {:?}: commensurable {ans:?}", fmt(gens)));
                    Some(Arc::new(SubgroupContext::new(
                        ctx.shared_presentation(),
                        gens.clone(),
                        ctx.q(),
                        ctx.lambda(),
                        ctx.epsilon(),
                    )?))
                }
                None if inputs.comm_element.is_none() => {
                    return Err(Error::Precondition(
                        "not-lonely mode needs a commensurator element or a finite-index subgroup".into(),
                    ))
                }
                None => None,
            }
        }
    };
    let h: &SubgroupContext = searched.as_deref().unwrap_or(ctx);
    let mut search = CrossingSearch::new(b, h, c, inputs.scan_radius, inputs.g_radius, inputs.pad)?;
    let mut track_a = Vec::new();
    let mut conclusion = Conclusion::BudgetExhausted;
    let mut slices = 0;
    while slices < inputs.budget {
        slices += 1;
        if let Some(cand) = inputs.candidates.get(track_a.len()) {
            let (ans, verdicts) = verify_candidate_splitting(ctx, cand, 8, 50_000)?;
            track_a.push(CandidateResult {
                generators: fmt(cand),
                commensurable: ans,
                verdicts,
            });
            if ans == Answer::Yes {
                conclusion = Conclusion::AssociatedWithSplitting {
                    candidate: track_a.len() - 1,
                };
                break;
            }
        }
        search.step(inputs.slice)?;
        match search.report().result {
            CrossingsResult::AllCrossed => {
                conclusion = Conclusion::NotAssociated;
                break;
            }
            CrossingsResult::NoAlmostInvariantSet => {
                conclusion = Conclusion::NoAlmostInvariantSet;
                break;
            }
            CrossingsResult::BudgetExhausted => {}
        }
        if search.is_exhausted() && track_a.len() >= inputs.candidates.len() {
            break;
        }
    }
    Ok(SplitReport {
        mode: inputs.mode,
        searched_subgroup: fmt(h.generators()),
        preprocessing,
        track_a,
        track_b: Some(search.report()),
        conclusion,
        slices,
    })
}
