//! Hashes of group elements through small finite quotients.
//!
//! Equal elements always hash equally, so a hash bucket narrows the set of
//! vertices an identity test has to be run against. For free groups the
//! freely reduced word is already a normal form; otherwise the hash combines
//! exponent sums over generators that every relator balances with images in
//! a few permutation representations found by randomized search.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::presentation::{free_reduce_letters, GroupPresentation, Letter, WordProblem};

type Perm = Vec<u8>;

#[derive(Clone, Debug)]
enum Kind {
    Free,
    Quotient {
        coords: Vec<usize>,
        /// `reps[k][letter]` is the image of `letter` in representation `k`.
        reps: Vec<Vec<Perm>>,
    },
}

#[derive(Clone, Debug)]
pub struct WordHasher {
    kind: Kind,
}

const SEARCH_SEED: u64 = 0x5eed_0f_9a0c;
const TARGET_REPS: usize = 3;
const TRIALS: usize = 120;

fn invert(p: &Perm) -> Perm {
    let mut q = vec![0u8; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x as usize] = i as u8;
    }
    q
}

fn all_perms(m: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Perm>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u8);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

fn apply(state: &mut [u8], p: &Perm) {
    for s in state.iter_mut() {
        *s = p[*s as usize];
    }
}

fn satisfies(letter_perms: &[Perm], relators: &[Vec<Letter>], m: usize) -> bool {
    let mut state: Vec<u8> = (0..m as u8).collect();
    relators.iter().all(|r| {
        for (i, s) in state.iter_mut().enumerate() {
            *s = i as u8;
        }
        for x in r {
            apply(&mut state, &letter_perms[x.index()]);
        }
        state.iter().enumerate().all(|(i, &s)| s as usize == i)
    })
}

fn letter_table(gen_perms: &[Perm]) -> Vec<Perm> {
    gen_perms.iter().flat_map(|p| [p.clone(), invert(p)]).collect()
}

fn nonabelian(gen_perms: &[Perm]) -> bool {
    let compose = |p: &Perm, q: &Perm| -> Perm { p.iter().map(|&x| q[x as usize]).collect() };
    for i in 0..gen_perms.len() {
        for j in i + 1..gen_perms.len() {
            if compose(&gen_perms[i], &gen_perms[j]) != compose(&gen_perms[j], &gen_perms[i]) {
                return true;
            }
        }
    }
    false
}

fn search_reps(p: &GroupPresentation) -> Vec<Vec<Perm>> {
    let rank = p.alphabet().rank();
    if rank < 2 {
        return Vec::new();
    }
    let relators: Vec<Vec<Letter>> = p.relators().iter().map(|r| r.letters().to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let mut reps = Vec::new();
    for m in [7usize, 6, 5] {
        let perms = all_perms(m);
        for _ in 0..TRIALS {
            if reps.len() >= TARGET_REPS {
                return reps;
            }
            let mut gens: Vec<Perm> = (0..rank - 1)
                .map(|_| {
                    let mut v: Perm = (0..m as u8).collect();
                    v.shuffle(&mut rng);
                    v
                })
                .collect();
            gens.push(Vec::new());
            let start = rand::Rng::gen_range(&mut rng, 0..perms.len());
            for k in 0..perms.len() {
                gens[rank - 1] = perms[(start + k) % perms.len()].clone();
                if !nonabelian(&gens) {
                    continue;
                }
                let table = letter_table(&gens);
                if satisfies(&table, &relators, m) {
                    reps.push(table);
                    break;
                }
            }
        }
    }
    reps
}

impl WordHasher {
    pub fn new(p: &GroupPresentation) -> Self {
        let kind = match p.strategy() {
            WordProblem::FreeGroup => Kind::Free,
            _ => {
                let rank = p.alphabet().rank();
                let coords = (0..rank)
                    .filter(|&g| {
                        p.relators().iter().all(|r| {
                            r.letters()
                                .iter()
                                .filter(|x| x.generator() == g)
                                .map(|x| if x.is_inverse() { -1i64 } else { 1 })
                                .sum::<i64>()
                                == 0
                        })
                    })
                    .collect();
                Kind::Quotient {
                    coords,
                    reps: search_reps(p),
                }
            }
        };
        WordHasher { kind }
    }

    pub fn representation_count(&self) -> usize {
        match &self.kind {
            Kind::Free => 0,
            Kind::Quotient { reps, .. } => reps.len(),
        }
    }

    pub fn hash<I>(&self, letters: I) -> u64
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut h = DefaultHasher::new();
        match &self.kind {
            Kind::Free => free_reduce_letters(letters).hash(&mut h),
            Kind::Quotient { coords, reps } => {
                let mut sums = vec![0i64; coords.len()];
                let mut states: Vec<Vec<u8>> = reps.iter().map(|r| (0..r[0].len() as u8).collect()).collect();
                for x in letters {
                    if let Some(k) = coords.iter().position(|&g| g == x.generator()) {
                        sums[k] += if x.is_inverse() { -1 } else { 1 };
                    }
                    for (state, rep) in states.iter_mut().zip(reps) {
                        apply(state, &rep[x.index()]);
                    }
                }
                sums.hash(&mut h);
                states.hash(&mut h);
            }
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Alphabet;

    fn surface() -> GroupPresentation {
        let a = Alphabet::new(vec!['a', 'b', 'c', 'd']).unwrap();
        let r = a.parse_word("abABcdCD").unwrap();
        GroupPresentation::new("surface2", a, vec![r]).unwrap()
    }

    #[test]
    fn surface_group_has_permutation_quotients() {
        let p = surface();
        let h = WordHasher::new(&p);
        assert!(h.representation_count() > 0);
        let r = p.word("abABcdCD").unwrap();
        assert_eq!(h.hash(r.letters().iter().copied()), h.hash(std::iter::empty()));
        let u = p.word("abABc").unwrap();
        let v = p.word("dcD").unwrap();
        assert_eq!(h.hash(u.letters().iter().copied()), h.hash(v.letters().iter().copied()));
    }

    #[test]
    fn deterministic() {
        let p = surface();
        let w = p.word("abcD").unwrap();
        let x = WordHasher::new(&p).hash(w.letters().iter().copied());
        let y = WordHasher::new(&p).hash(w.letters().iter().copied());
        assert_eq!(x, y);
    }
}
