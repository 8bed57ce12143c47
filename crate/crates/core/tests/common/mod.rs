#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use hypsplit::constants::Rational;
use hypsplit::presentation::{Alphabet, GroupPresentation, Letter, Word};
use hypsplit::subgroup::SubgroupContext;

pub fn surface() -> Arc<GroupPresentation> {
    let a = Alphabet::new(vec!['a', 'b', 'c', 'd']).unwrap();
    let r = a.parse_word("abABcdCD").unwrap();
    Arc::new(GroupPresentation::new("surface2", a, vec![r]).unwrap())
}

pub fn free2() -> Arc<GroupPresentation> {
    Arc::new(GroupPresentation::free("free2", "ab").unwrap())
}

pub fn ctx(p: &Arc<GroupPresentation>, gens: &[&str]) -> SubgroupContext {
    let words = gens.iter().map(|s| p.word(s).unwrap()).collect();
    SubgroupContext::new(Arc::clone(p), words, 0, Rational::from_integer(1), Rational::from_integer(0)).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Free reduction on raw letter codes.
pub fn reduce(w: impl IntoIterator<Item = u8>) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::new();
    for x in w {
        if out.last() == Some(&(x ^ 1)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn invert(w: &[u8]) -> Vec<u8> {
    w.iter().rev().map(|x| x ^ 1).collect()
}

pub fn codes(w: &Word) -> Vec<u8> {
    w.letters().iter().map(|l| l.0).collect()
}

pub fn word(codes: &[u8]) -> Word {
    Word(codes.iter().map(|&c| Letter(c)).collect())
}

/// Run the command line in-process, returning (exit code, stdout).
pub fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["hypsplit"];
    full.extend_from_slice(args);
    let code = hypsplit::cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}
