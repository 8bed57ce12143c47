//! Group presentations over a symmetrized alphabet and their word problem.
//!
//! Generators are lowercase letters; the matching uppercase letter is the
//! formal inverse. Internally generator `i` is letter `2i` and its inverse
//! is `2i + 1`, so inversion is `x ^ 1` and letter order is shortlex order
//! `a < A < b < B < ...`.

use std::cmp::Ordering;

use num::rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    generators: Vec<char>,
}

impl Alphabet {
    pub fn new(generators: Vec<char>) -> Result<Self> {
        for (i, &c) in generators.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("generator '{c}' must be a lowercase ASCII letter"),
                });
            }
            if generators[..i].contains(&c) {
                return Err(Error::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("generator '{c}' listed twice"),
                });
            }
        }
        if generators.len() > 127 {
            return Err(Error::Domain("at most 127 generators".into()));
        }
        Ok(Alphabet { generators })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Number of letters including inverses.
    pub fn size(&self) -> usize {
        2 * self.generators.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size() as u8).map(Letter)
    }

    pub fn generators(&self) -> &[char] {
        &self.generators
    }

    pub fn symbol(&self, x: Letter) -> char {
        let c = self.generators[x.generator()];
        if x.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn letter(&self, c: char) -> Result<Letter> {
        let lower = c.to_ascii_lowercase();
        let i = self
            .generators
            .iter()
            .position(|&g| g == lower)
            .ok_or(Error::UnknownLetter(c))?;
        Ok(Letter((2 * i) as u8 + u8::from(c.is_ascii_uppercase())))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| self.letter(c))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn format(&self, w: &Word) -> String {
        w.0.iter().map(|&x| self.symbol(x)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| x.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&a), Some(&b)) => self.0.len() < 2 || a != b.inverse(),
                _ => true,
            }
    }

    /// Shortlex comparison: shorter words first, then letter by letter.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

pub fn free_reduce(w: &Word) -> Word {
    Word(free_reduce_letters(w.0.iter().copied()))
}

pub(crate) fn free_reduce_letters(it: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for x in it {
        if out.last() == Some(&x.inverse()) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Strip matching first/last letter pairs from a freely reduced word.
pub fn cyclic_reduce(w: &Word) -> Word {
    let v = free_reduce(w).0;
    let mut lo = 0;
    let mut hi = v.len();
    while hi - lo >= 2 && v[lo] == v[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    Word(v[lo..hi].to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WordProblem {
    FreeGroup,
    DehnSmallCancellation,
    /// Relators present but the C'(1/6) certificate was rejected.
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallCancellationCertificate {
    pub max_piece_length: usize,
    pub min_relator_length: usize,
    #[serde(serialize_with = "crate::constants::ser_ratio")]
    pub ratio: Ratio<i64>,
    pub accepted: bool,
}

/// A cyclic conjugate of a relator or of its inverse.
#[derive(Clone, Debug)]
struct Conjugate {
    letters: Vec<Letter>,
}

#[derive(Clone, Debug)]
pub struct GroupPresentation {
    name: String,
    alphabet: Alphabet,
    relators: Vec<Word>,
    strategy: WordProblem,
    certificate: Option<SmallCancellationCertificate>,
    conjugates: Vec<Conjugate>,
    by_first: Vec<Vec<usize>>,
}

impl GroupPresentation {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        let name = name.into();
        let mut reduced = Vec::with_capacity(relators.len());
        for (i, r) in relators.iter().enumerate() {
            let c = cyclic_reduce(r);
            if c.is_empty() {
                return Err(Error::EmptyRelator {
                    index: i,
                    text: alphabet.format(r),
                });
            }
            reduced.push(c);
        }
        let mut conjugates = Vec::new();
        for r in &reduced {
            for w in [r.clone(), r.inverse()] {
                let n = w.len();
                for shift in 0..n {
                    let letters = (0..n).map(|k| w.0[(shift + k) % n]).collect();
                    conjugates.push(Conjugate { letters });
                }
            }
        }
        let mut by_first = vec![Vec::new(); alphabet.size()];
        for (i, c) in conjugates.iter().enumerate() {
            by_first[c.letters[0].index()].push(i);
        }
        let mut p = GroupPresentation {
            name,
            alphabet,
            relators: reduced,
            strategy: WordProblem::FreeGroup,
            certificate: None,
            conjugates,
            by_first,
        };
        if !p.relators.is_empty() {
            let cert = certify_small_cancellation(&p)?;
            p.strategy = if cert.accepted {
                WordProblem::DehnSmallCancellation
            } else {
                WordProblem::Unverified
            };
            p.certificate = Some(cert);
        }
        Ok(p)
    }

    pub fn free(name: impl Into<String>, generators: &str) -> Result<Self> {
        let alphabet = Alphabet::new(generators.chars().filter(|c| !c.is_whitespace()).collect())?;
        Self::new(name, alphabet, Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn strategy(&self) -> WordProblem {
        self.strategy
    }

    pub fn certificate(&self) -> Option<&SmallCancellationCertificate> {
        self.certificate.as_ref()
    }

    pub fn word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    pub fn format(&self, w: &Word) -> String {
        self.alphabet.format(w)
    }

    fn require_verified(&self) -> Result<()> {
        match self.strategy {
            WordProblem::Unverified => Err(Error::StrategyNotVerified(self.name.clone())),
            _ => Ok(()),
        }
    }

    /// Dehn's algorithm: replace any subword longer than half of a cyclic
    /// relator conjugate by the inverse of the complement, then freely reduce.
    pub fn dehn_reduce(&self, w: &Word) -> Result<Word> {
        self.require_verified()?;
        Ok(Word(self.dehn_letters(free_reduce_letters(w.0.iter().copied()))))
    }

    fn dehn_letters(&self, mut w: Vec<Letter>) -> Vec<Letter> {
        if self.conjugates.is_empty() {
            return w;
        }
        'outer: loop {
            for i in 0..w.len() {
                for &ci in &self.by_first[w[i].index()] {
                    let r = &self.conjugates[ci].letters;
                    let n = r.len();
                    let mut m = 0;
                    while m < n && i + m < w.len() && w[i + m] == r[m] {
                        m += 1;
                    }
                    if 2 * m > n {
                        let replacement = r[m..].iter().rev().map(|x| x.inverse());
                        let tail: Vec<Letter> = w[i + m..].to_vec();
                        w.truncate(i);
                        let merged = w.drain(..).chain(replacement).chain(tail);
                        w = free_reduce_letters(merged);
                        continue 'outer;
                    }
                }
            }
            return w;
        }
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        self.require_verified()?;
        Ok(self.is_identity_letters(w.0.iter().copied()))
    }

    /// Identity test on a letter stream; callers must have checked the strategy.
    pub(crate) fn is_identity_letters(&self, it: impl IntoIterator<Item = Letter>) -> bool {
        let reduced = free_reduce_letters(it);
        match self.strategy {
            WordProblem::FreeGroup => reduced.is_empty(),
            _ => self.dehn_letters(reduced).is_empty(),
        }
    }

    /// `u == v` in the group.
    pub(crate) fn equal(&self, u: &[Letter], v: &[Letter]) -> bool {
        self.is_identity_letters(u.iter().copied().chain(v.iter().rev().map(|x| x.inverse())))
    }

    pub fn is_verified(&self) -> bool {
        self.strategy != WordProblem::Unverified
    }
}

/// Compute the largest piece over all pairs of distinct cyclic conjugates of
/// relators and their inverses.
pub fn certify_small_cancellation(p: &GroupPresentation) -> Result<SmallCancellationCertificate> {
    if p.relators.is_empty() {
        return Err(Error::Precondition(
            "small cancellation certificate needs at least one relator".into(),
        ));
    }
    let mut max_piece = 0usize;
    for bucket in &p.by_first {
        for (k, &i) in bucket.iter().enumerate() {
            for &j in &bucket[k + 1..] {
                let a = &p.conjugates[i].letters;
                let b = &p.conjugates[j].letters;
                let common = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
                max_piece = max_piece.max(common);
            }
        }
    }
    let min_len = p.relators.iter().map(Word::len).min().unwrap_or(0);
    let ratio = Ratio::new(max_piece as i64, min_len as i64);
    Ok(SmallCancellationCertificate {
        max_piece_length: max_piece,
        min_relator_length: min_len,
        ratio,
        accepted: ratio < Ratio::new(1, 6),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface() -> GroupPresentation {
        let a = Alphabet::new(vec!['a', 'b', 'c', 'd']).unwrap();
        let r = a.parse_word("abABcdCD").unwrap();
        GroupPresentation::new("surface2", a, vec![r]).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        let a = Alphabet::new(vec!['a', 'b']).unwrap();
        let f = |s: &str| a.format(&free_reduce(&a.parse_word(s).unwrap()));
        assert_eq!(f("aA"), "");
        assert_eq!(f("abBA"), "");
        assert_eq!(f("abAB"), "abAB");
    }

    #[test]
    fn letters_pair_with_inverses() {
        let a = Alphabet::new(vec!['x', 'y']).unwrap();
        for x in a.letters() {
            assert_ne!(x, x.inverse());
            assert_eq!(x.inverse().inverse(), x);
        }
        assert_eq!(a.letter('Y').unwrap(), Letter(3));
        assert!(matches!(a.letter('z'), Err(Error::UnknownLetter('z'))));
    }

    #[test]
    fn surface_certificate() {
        let p = surface();
        let c = p.certificate().unwrap();
        assert_eq!(c.max_piece_length, 1);
        assert_eq!(c.min_relator_length, 8);
        assert_eq!(c.ratio, Ratio::new(1, 8));
        assert!(c.accepted);
        assert_eq!(p.strategy(), WordProblem::DehnSmallCancellation);
    }

    #[test]
    fn proper_power_is_rejected() {
        let a = Alphabet::new(vec!['a', 'b']).unwrap();
        let r = a.parse_word("abab").unwrap();
        let p = GroupPresentation::new("pp", a, vec![r]).unwrap();
        let c = p.certificate().unwrap();
        assert!(c.max_piece_length >= 2);
        assert!(c.ratio >= Ratio::new(2, 4));
        assert!(!c.accepted);
        assert_eq!(p.strategy(), WordProblem::Unverified);
        let w = p.word("ab").unwrap();
        assert!(matches!(p.dehn_reduce(&w), Err(Error::StrategyNotVerified(_))));
    }

    #[test]
    fn dehn_examples() {
        let p = surface();
        let w = p.word("abABcdCD").unwrap();
        assert!(p.dehn_reduce(&w).unwrap().is_empty());
        let a = p.word("a").unwrap();
        assert_eq!(p.dehn_reduce(&a).unwrap(), a);
        assert!(!p.is_identity(&p.word("ab").unwrap()).unwrap());
        assert!(p.is_identity(&p.word("cdCDabAB").unwrap()).unwrap());
        // Five letters of the relator equal the inverse of the other three.
        let u = p.word("abABc").unwrap();
        let v = p.word("dCD").unwrap();
        assert!(p.is_identity(&u.concat(&v)).unwrap());

        let f = GroupPresentation::free("f2", "ab").unwrap();
        let w = f.word("baB").unwrap();
        assert_eq!(f.dehn_reduce(&w).unwrap(), w);
        assert!(f.is_identity(&f.word("aA").unwrap()).unwrap());
    }

    #[test]
    fn cyclic_reduction_at_construction() {
        let a = Alphabet::new(vec!['a', 'b']).unwrap();
        let r = a.parse_word("bababbaB").unwrap();
        let p = GroupPresentation::new("g", a.clone(), vec![r]).unwrap();
        assert_eq!(a.format(&p.relators()[0]), "ababba");
        let e = GroupPresentation::new("g", a.clone(), vec![a.parse_word("aA").unwrap()]);
        assert!(matches!(e, Err(Error::EmptyRelator { index: 0, .. })));
    }
}
