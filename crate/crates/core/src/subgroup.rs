//! The subgroup H = ⟨Y⟩ with its quasiconvexity and embedding constants.
//!
//! Elements of H are reached by enumerating freely reduced words over the
//! symmetrized generating set Y. A `(λ, ε)` embedding means every `h` with
//! `|h|_G <= L` is spelled by a Y-word of length at most `ceil(λL + λε)`,
//! which makes enumeration exact.
//!
//! Two cases skip enumeration. When G is free, Y is replaced by the free
//! basis read off the folded graph of H, and projections follow that graph.
//! When Y contains every generator of G, H = G.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::cayley::{CayleyBall, Vertex};
use crate::constants::Rational;
use crate::error::{Error, Result};
use crate::fingerprint::WordHasher;
use crate::folding::{self, fold, Basis, FoldedGraph};
use crate::presentation::{free_reduce_letters, GroupPresentation, Letter, Word, WordProblem};

pub const DEFAULT_ENUMERATION_BUDGET: usize = 4_000_000;

/// An element of H with its Y-spelling and its freely reduced G-word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HElement {
    /// Y-letters: `2i` is generator `i`, `2i + 1` its inverse.
    pub y: Vec<u8>,
    pub g: Vec<Letter>,
}

impl HElement {
    pub fn y_len(&self) -> usize {
        self.y.len()
    }

    pub fn word(&self) -> Word {
        Word(self.g.clone())
    }

    pub fn inverse_letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.g.iter().rev().map(|x| x.inverse())
    }

    pub fn inverse(&self) -> HElement {
        HElement {
            y: folding::inverse(&self.y),
            g: self.inverse_letters().collect(),
        }
    }
}

#[derive(Debug, Default)]
struct YWords {
    elems: Vec<HElement>,
    /// `level_end[n]` is the number of words of length at most `n`.
    level_end: Vec<usize>,
    by_hash: HashMap<u64, Vec<usize>>,
}

/// Read-only view of enumerated Y-words of length at most `len`.
#[derive(Clone, Debug)]
pub struct YView {
    words: Arc<YWords>,
    len: usize,
}

impl YView {
    pub fn elements(&self) -> &[HElement] {
        &self.words.elems[..self.words.level_end[self.len]]
    }

    fn candidates(&self, hash: u64) -> impl Iterator<Item = &HElement> + '_ {
        let end = self.words.level_end[self.len];
        self.words
            .by_hash
            .get(&hash)
            .into_iter()
            .flatten()
            .take_while(move |&&i| i < end)
            .map(move |&i| &self.words.elems[i])
    }
}

#[derive(Debug)]
pub struct SubgroupContext {
    presentation: Arc<GroupPresentation>,
    hasher: WordHasher,
    generators: Vec<Word>,
    y_letters: Vec<Vec<Letter>>,
    q: i64,
    lambda: Rational,
    epsilon: Rational,
    l: usize,
    budget: usize,
    cache: Mutex<Arc<YWords>>,
    shortcut: Shortcut,
}

#[derive(Debug)]
enum Shortcut {
    None,
    /// Y-letter spelling each G-letter.
    Whole(Vec<u8>),
    Free(FoldedGraph, Basis),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    /// `d(x, H) = dist`; `rep` is the canonical shortest element of the right
    /// coset `Hx` and `witness` the subgroup element with `witness·rep = x`.
    Within { dist: usize, rep: Vertex, witness: HElement },
    /// `d(x, H)` exceeds the limit.
    Beyond(usize),
}

impl Projection {
    pub fn distance(&self) -> Option<usize> {
        match self {
            Projection::Within { dist, .. } => Some(*dist),
            Projection::Beyond(_) => None,
        }
    }
}

impl SubgroupContext {
    pub fn new(
        p: Arc<GroupPresentation>,
        generators: Vec<Word>,
        q: i64,
        lambda: Rational,
        epsilon: Rational,
    ) -> Result<Self> {
        if lambda < Rational::from_integer(1) || epsilon < Rational::from_integer(0) || q < 0 {
            return Err(Error::Domain("need Q >= 0, lambda >= 1, epsilon >= 0".into()));
        }
        let mut generators: Vec<Word> = generators
            .iter()
            .map(|w| Word(free_reduce_letters(w.letters().iter().copied())))
            .filter(|w| !w.is_empty())
            .collect();
        let mut shortcut = Shortcut::None;
        if p.strategy() == WordProblem::FreeGroup {
            let raw: Vec<Vec<u8>> = generators.iter().map(|w| w.letters().iter().map(|x| x.0).collect()).collect();
            let g = fold(&raw);
            let basis = g.basis();
            generators = basis.words.iter().map(|w| Word(w.iter().map(|&x| Letter(x)).collect())).collect();
            shortcut = Shortcut::Free(g, basis);
        } else {
            let n = p.alphabet().generators().len();
            let mut map = vec![u8::MAX; 2 * n];
            for (i, w) in generators.iter().enumerate() {
                if let [x] = w.letters() {
                    map[x.0 as usize] = 2 * i as u8;
                    map[x.0 as usize ^ 1] = 2 * i as u8 + 1;
                }
            }
            if map.iter().all(|&y| y != u8::MAX) {
                shortcut = Shortcut::Whole(map);
            }
        }
        let y_letters = generators
            .iter()
            .flat_map(|w| [w.letters().to_vec(), w.inverse().letters().to_vec()])
            .collect();
        let l = generators.iter().map(Word::len).max().unwrap_or(0);
        let hasher = WordHasher::new(&p);
        let ctx = SubgroupContext {
            presentation: p,
            hasher,
            generators,
            y_letters,
            q,
            lambda,
            epsilon,
            l,
            budget: DEFAULT_ENUMERATION_BUDGET,
            cache: Mutex::new(Arc::new(YWords::default())),
            shortcut,
        };
        Ok(ctx)
    }

    /// H = G, generated by every letter.
    pub fn whole_group(p: Arc<GroupPresentation>) -> Result<Self> {
        let gens = p.alphabet().generators().iter().map(|c| p.word(&c.to_string())).collect::<Result<_>>()?;
        Self::new(p, gens, 0, Rational::from_integer(1), Rational::from_integer(0))
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn shared_presentation(&self) -> Arc<GroupPresentation> {
        Arc::clone(&self.presentation)
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Symmetrized generator words, indexed by Y-letter.
    pub fn y_letters(&self) -> &[Vec<Letter>] {
        &self.y_letters
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    /// Longest generator length.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Whether projections enumerate Y-words.
    pub fn enumerates(&self) -> bool {
        matches!(self.shortcut, Shortcut::None)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Y-length sufficient to reach every `h` with `|h|_G <= len`.
    pub fn y_bound(&self, len: usize) -> usize {
        (self.lambda * Rational::from_integer(len as i64) + self.lambda * self.epsilon)
            .ceil()
            .to_integer()
            .max(0) as usize
    }

    pub fn element(&self, y: Vec<u8>) -> HElement {
        let g = free_reduce_letters(y.iter().flat_map(|&i| self.y_letters[i as usize].iter().copied()));
        HElement { y, g }
    }

    pub fn identity(&self) -> HElement {
        self.element(Vec::new())
    }

    pub fn hash_letters(&self, letters: impl IntoIterator<Item = Letter>) -> u64 {
        self.hasher.hash(letters)
    }

    /// All freely reduced Y-words of length at most `len`.
    pub fn y_words(&self, len: usize) -> Result<YView> {
        let mut guard = self.cache.lock().expect("subgroup cache poisoned");
        if guard.level_end.len() <= len {
            let mut words = YWords {
                elems: guard.elems.clone(),
                level_end: guard.level_end.clone(),
                by_hash: guard.by_hash.clone(),
            };
            if words.level_end.is_empty() {
                let e = self.identity();
                words.by_hash.entry(self.hasher.hash(e.g.iter().copied())).or_default().push(0);
                words.elems.push(e);
                words.level_end.push(1);
            }
            let k = self.y_letters.len() as u8;
            while words.level_end.len() <= len {
                let n = words.level_end.len();
                let start = if n >= 2 { words.level_end[n - 2] } else { 0 };
                let end = words.level_end[n - 1];
                for i in start..end {
                    for y in 0..k {
                        if words.elems[i].y.last().is_some_and(|&last| last == y ^ 1) {
                            continue;
                        }
                        if words.elems.len() >= self.budget {
                            return Err(Error::BudgetExhausted(format!(
                                "more than {} subgroup words below Y-length {len}",
                                self.budget
                            )));
                        }
                        let mut yw = words.elems[i].y.clone();
                        yw.push(y);
                        let e = self.element(yw);
                        let h = self.hasher.hash(e.g.iter().copied());
                        words.by_hash.entry(h).or_default().push(words.elems.len());
                        words.elems.push(e);
                    }
                }
                words.level_end.push(words.elems.len());
            }
            *guard = Arc::new(words);
        }
        Ok(YView {
            words: Arc::clone(&guard),
            len,
        })
    }

    /// A subgroup element equal to the given letters, searched among Y-words
    /// of length at most `y_len`.
    pub fn find_element(&self, letters: &[Letter], y_len: usize) -> Result<Option<HElement>> {
        match &self.shortcut {
            Shortcut::Whole(map) => return Ok(Some(self.element(free_reduce_letters(letters.iter().copied()).iter().map(|x| map[x.0 as usize]).collect()))),
            Shortcut::Free(g, basis) => {
                let w: Vec<u8> = letters.iter().map(|x| x.0).collect();
                return Ok(basis.spell(g, &w).map(|y| self.element(y)));
            }
            Shortcut::None => {}
        }
        let view = self.y_words(y_len)?;
        let w = free_reduce_letters(letters.iter().copied());
        let h = self.hasher.hash(w.iter().copied());
        let p = &self.presentation;
        let found = view.candidates(h).find(|e| p.equal(&e.g, &w)).cloned();
        Ok(found)
    }

    /// Bound on `|w|_G`: the ball layer when `w` lies in it, else its reduced length.
    fn length_bound(&self, b: Option<&CayleyBall>, w: &[Letter]) -> usize {
        let reduced = free_reduce_letters(w.iter().copied());
        b.and_then(|b| b.locate_letters(reduced.iter().copied()).map(|v| b.layer(v)))
            .unwrap_or(reduced.len())
    }
}

/// Exactly `{h ∈ H : d(1,h) <= L}`, sorted by vertex index.
pub fn subgroup_ball(ctx: &SubgroupContext, b: &CayleyBall, len: usize) -> Result<Vec<Vertex>> {
    b.require_radius("subgroup ball", len)?;
    if !ctx.enumerates() {
        let mut out = Vec::new();
        for v in b.ball(len) {
            let v = v as Vertex;
            if ctx.find_element(&b.rep_letters(v), 0)?.is_some() {
                out.push(v);
            }
        }
        return Ok(out);
    }
    let view = ctx.y_words(ctx.y_bound(len))?;
    let mut out: Vec<Vertex> = view
        .elements()
        .iter()
        .filter_map(|e| b.locate_letters(e.g.iter().copied()))
        .filter(|&v| b.layer(v) <= len)
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A Y-spelling of `w` if `w ∈ H`.
pub fn member_word(ctx: &SubgroupContext, b: &CayleyBall, w: &Word) -> Result<Option<HElement>> {
    let len = ctx.length_bound(Some(b), w.letters());
    ctx.find_element(w.letters(), ctx.y_bound(len))
}

pub fn is_member(ctx: &SubgroupContext, b: &CayleyBall, w: &Word) -> Result<bool> {
    Ok(member_word(ctx, b, w)?.is_some())
}

/// Membership without a ball, bounding `|w|_G` by its reduced length.
pub fn is_member_letters(ctx: &SubgroupContext, w: &[Letter]) -> Result<bool> {
    let len = ctx.length_bound(None, w);
    Ok(ctx.find_element(w, ctx.y_bound(len))?.is_some())
}

/// Project the element spelled by `x` onto H, looking only up to `limit`.
///
/// Exact whenever the ball radius is at least `limit`: every `h⁻¹x` of length
/// at most `limit` is then a ball vertex, and a nearest `h` has
/// `|h| <= |x| + limit`.
pub fn project_letters(ctx: &SubgroupContext, b: &CayleyBall, x: &[Letter], limit: usize) -> Result<Projection> {
    b.require_radius("projection onto the subgroup", limit)?;
    let x = free_reduce_letters(x.iter().copied());
    match &ctx.shortcut {
        Shortcut::Whole(_) => {
            let witness = ctx.find_element(&x, 0)?.expect("H = G");
            return Ok(Projection::Within { dist: 0, rep: 0, witness });
        }
        Shortcut::Free(g, basis) => return Ok(project_free(ctx, b, g, basis, &x, limit)),
        Shortcut::None => {}
    }
    let xlen = ctx.length_bound(Some(b), &x);
    let view = ctx.y_words(ctx.y_bound(xlen + limit))?;
    let mut best: Option<(usize, Vertex, &HElement)> = None;
    for e in view.elements() {
        let Some(v) = b.locate_letters(e.inverse_letters().chain(x.iter().copied())) else {
            continue;
        };
        let key = (b.layer(v), v);
        if key.0 > limit {
            continue;
        }
        if best.is_none_or(|(d, u, _)| key < (d, u)) {
            best = Some((key.0, key.1, e));
        }
    }
    Ok(match best {
        Some((dist, rep, e)) => Projection::Within {
            dist,
            rep,
            witness: e.clone(),
        },
        None => Projection::Beyond(limit),
    })
}

/// In a free group, read `x = p·s` with `p` the longest prefix the folded
/// graph accepts, ending at `v`. The coset `Hx` hangs `|s|` below `v`.
fn project_free(ctx: &SubgroupContext, b: &CayleyBall, g: &FoldedGraph, basis: &Basis, x: &[Letter], limit: usize) -> Projection {
    let raw: Vec<u8> = x.iter().map(|l| l.0).collect();
    let (v, read) = g.read(&raw);
    let dist = basis.tree[v].len() + raw.len() - read;
    if dist > limit {
        return Projection::Beyond(limit);
    }
    let rep_word = basis.tree[v].iter().chain(&raw[read..]).map(|&l| Letter(l));
    let rep = b.locate_letters(rep_word).expect("ball radius covers the limit");
    let h: Vec<u8> = raw[..read].iter().copied().chain(folding::inverse(&basis.tree[v])).collect();
    let y = basis.spell(g, &h).expect("closed path");
    Projection::Within {
        dist,
        rep,
        witness: ctx.element(y),
    }
}

pub fn project(ctx: &SubgroupContext, b: &CayleyBall, x: Vertex, limit: usize) -> Result<Projection> {
    project_letters(ctx, b, &b.rep_letters(x), limit)
}

/// Exact `d(x, H)`.
pub fn distance_to_subgroup(ctx: &SubgroupContext, b: &CayleyBall, x: Vertex) -> Result<usize> {
    match project(ctx, b, x, b.layer(x))? {
        Projection::Within { dist, .. } => Ok(dist),
        Projection::Beyond(_) => unreachable!("the identity lies in H"),
    }
}

/// Exact `d(x, gH) = d(g⁻¹x, H)`.
pub fn distance_to_coset(ctx: &SubgroupContext, b: &CayleyBall, g: Vertex, x: Vertex) -> Result<usize> {
    let gx: Vec<Letter> = b
        .rep_letters(g)
        .iter()
        .rev()
        .map(|s| s.inverse())
        .chain(b.rep_letters(x))
        .collect();
    let upper = free_reduce_letters(gx.iter().copied()).len();
    let limit = upper.min(b.radius());
    match project_letters(ctx, b, &gx, limit)? {
        Projection::Within { dist, .. } => Ok(dist),
        Projection::Beyond(_) => Err(Error::radius("distance to a coset", upper, b.radius())),
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct QuasiconvexityReport {
    pub radius: usize,
    pub pairs_checked: usize,
    pub max_excursion: usize,
    pub q: i64,
    pub violated: bool,
}

/// Check that geodesics between elements of `H ∩ B_L` stay within Q of H.
pub fn check_quasiconvexity(ctx: &SubgroupContext, b: &CayleyBall, len: usize) -> Result<QuasiconvexityReport> {
    let hs = subgroup_ball(ctx, b, len)?;
    let mut pairs = 0;
    let mut worst = 0;
    for (i, &h1) in hs.iter().enumerate() {
        for &h2 in &hs[i + 1..] {
            let Some(q) = b.quotient(h1, h2) else { continue };
            pairs += 1;
            let mut v = h1;
            for s in b.rep_letters(q) {
                let Some(next) = b.translate(v, &[s]) else { break };
                v = next;
                worst = worst.max(distance_to_subgroup(ctx, b, v)?);
            }
        }
    }
    Ok(QuasiconvexityReport {
        radius: len,
        pairs_checked: pairs,
        max_excursion: worst,
        q: ctx.q,
        violated: worst as i64 > ctx.q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_ball;

    fn setup(gens: &[&str]) -> (SubgroupContext, CayleyBall) {
        let p = Arc::new(GroupPresentation::free("f2", "ab").unwrap());
        let b = build_ball(Arc::clone(&p), 5, 1 << 20).unwrap();
        let gens = gens.iter().map(|g| p.word(g).unwrap()).collect();
        let ctx = SubgroupContext::new(p, gens, 0, Rational::from_integer(1), Rational::from_integer(0)).unwrap();
        (ctx, b)
    }

    #[test]
    fn axis_in_tree() {
        let (ctx, b) = setup(&["a"]);
        let got: Vec<String> = subgroup_ball(&ctx, &b, 3)
            .unwrap()
            .into_iter()
            .map(|v| b.presentation().format(&b.rep(v)))
            .collect();
        assert_eq!(got, vec!["", "a", "A", "aa", "AA", "aaa", "AAA"]);
        assert_eq!(subgroup_ball(&ctx, &b, 0).unwrap(), vec![0]);
    }

    #[test]
    fn membership_and_distances() {
        let (ctx, b) = setup(&["a"]);
        let p = b.presentation();
        assert!(is_member(&ctx, &b, &p.word("aaa").unwrap()).unwrap());
        assert!(!is_member(&ctx, &b, &p.word("ab").unwrap()).unwrap());
        assert!(is_member(&ctx, &b, &Word::empty()).unwrap());
        let at = |s: &str| b.locate(&p.word(s).unwrap()).unwrap();
        assert_eq!(distance_to_subgroup(&ctx, &b, at("aa")).unwrap(), 0);
        assert_eq!(distance_to_subgroup(&ctx, &b, at("b")).unwrap(), 1);
        assert_eq!(distance_to_subgroup(&ctx, &b, at("bb")).unwrap(), 2);
        assert_eq!(distance_to_coset(&ctx, &b, at("b"), at("b")).unwrap(), 0);
        assert_eq!(distance_to_coset(&ctx, &b, at("b"), 0).unwrap(), 1);
    }

    #[test]
    fn projection_is_canonical_on_cosets() {
        let (ctx, b) = setup(&["a"]);
        let p = b.presentation();
        let at = |s: &str| b.locate(&p.word(s).unwrap()).unwrap();
        let rep = |v| match project(&ctx, &b, v, 3).unwrap() {
            Projection::Within { rep, .. } => rep,
            Projection::Beyond(_) => panic!(),
        };
        assert_eq!(rep(at("ab")), rep(at("Ab")));
        assert_eq!(rep(at("aab")), at("b"));
        assert_ne!(rep(at("ab")), rep(at("aB")));
    }
}
