//! Line-oriented input files.
//!
//! ```text
//! [group]
//! name = surface2
//! generators = a b c d
//! relators = abABcdCD
//! [subgroup]
//! generators = a
//! [constants]
//! r = 1
//! K = 1
//! R = 2
//! [candidate]
//! edge_generators = a
//! ```
//!
//! `key value` is accepted as well as `key = value`; `#` starts a comment.

use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::presentation::{Alphabet, GroupPresentation, Word};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub q: Option<u32>,
    pub lambda: Option<Ratio<i64>>,
    pub epsilon: Option<Ratio<i64>>,
    pub r: Option<u32>,
    pub k: Option<u32>,
    pub big_r: Option<u32>,
    pub ball_radius: Option<usize>,
    pub budget: Option<usize>,
    pub delta: Option<u32>,
    pub n: Option<u32>,
    pub a: Option<Ratio<i64>>,
    pub k1: Option<Ratio<i64>>,
    pub k2: Option<Ratio<i64>>,
    pub eta: Option<u32>,
    pub mode: Option<String>,
    pub pad: Option<u32>,
    pub ladder: Option<Vec<(u32, u32, u32)>>,
    pub oracle: Option<String>,
    pub lonely: Option<String>,
    pub comm_element: Option<String>,
    pub finite_index_subgroup: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct InputFile {
    pub presentation: GroupPresentation,
    pub subgroup: Option<Vec<Word>>,
    pub settings: Settings,
    pub candidates: Vec<Vec<Word>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Group,
    Subgroup,
    Constants,
    Candidate,
}

struct Raw {
    line: usize,
    column: usize,
    value: String,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_rational(text: &str) -> Option<Ratio<i64>> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        return (d != 0).then(|| Ratio::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 12 {
            return None;
        }
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().ok()?;
        let num = int.abs() * den + f;
        return Some(Ratio::new(if neg { -num } else { num }, den));
    }
    t.parse::<i64>().ok().map(Ratio::from_integer)
}

fn words_list(value: &str) -> Vec<String> {
    let v = value.trim();
    if v.is_empty() || v == "(none)" || v == "none" {
        return Vec::new();
    }
    v.split(',').map(|w| w.split_whitespace().collect::<String>()).collect()
}

fn parse_words(alphabet: &Alphabet, raw: &Raw) -> Result<Vec<Word>> {
    words_list(&raw.value)
        .iter()
        .map(|w| {
            alphabet.parse_word(w).map_err(|e| match e {
                Error::UnknownLetter(c) => syntax(
                    raw.line,
                    raw.column,
                    format!("letter '{c}' has no generator/inverse pairing"),
                ),
                other => other,
            })
        })
        .collect()
}

/// Parse only the group presentation of an input file.
pub fn parse_presentation(text: &str) -> Result<GroupPresentation> {
    parse_input(text).map(|f| f.presentation)
}

pub fn parse_input(text: &str) -> Result<InputFile> {
    let mut section = Section::Group;
    let mut name: Option<String> = None;
    let mut generators: Option<Raw> = None;
    let mut relators: Option<Raw> = None;
    let mut subgroup: Option<Raw> = None;
    let mut candidates: Vec<Option<Raw>> = Vec::new();
    let mut settings = Settings::default();

    for (idx, full) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = full.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            let Some(inner) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                return Err(syntax(line_no, indent + 1, "unterminated section header"));
            };
            section = match inner.trim() {
                "group" => Section::Group,
                "subgroup" => Section::Subgroup,
                "constants" => Section::Constants,
                "candidate" => {
                    candidates.push(None);
                    Section::Candidate
                }
                other => {
                    return Err(syntax(line_no, indent + 2, format!("unknown section '{other}'")))
                }
            };
            continue;
        }
        let (key, value, value_col) = match trimmed.find('=') {
            Some(p) => (
                trimmed[..p].trim(),
                trimmed[p + 1..].trim(),
                indent + p + 2 + (trimmed[p + 1..].len() - trimmed[p + 1..].trim_start().len()),
            ),
            None => match trimmed.find(char::is_whitespace) {
                Some(p) => (
                    &trimmed[..p],
                    trimmed[p..].trim(),
                    indent + p + 1 + (trimmed[p..].len() - trimmed[p..].trim_start().len()),
                ),
                None => (trimmed, "", indent + trimmed.len() + 1),
            },
        };
        let raw = || Raw {
            line: line_no,
            column: value_col,
            value: value.to_string(),
        };
        let uint = |v: &str| -> Result<u32> {
            v.parse::<u32>()
                .map_err(|_| syntax(line_no, value_col, format!("expected a non-negative integer for '{key}'")))
        };
        let rational = |v: &str| -> Result<Ratio<i64>> {
            parse_rational(v).ok_or_else(|| syntax(line_no, value_col, format!("expected a rational for '{key}'")))
        };
        if key == "subgroup.generators" {
            subgroup = Some(raw());
            continue;
        }
        match (section, key) {
            (Section::Group, "name") => name = Some(value.to_string()),
            (Section::Group, "generators") => generators = Some(raw()),
            (Section::Group, "relators") => relators = Some(raw()),
            (Section::Subgroup, "generators") => subgroup = Some(raw()),
            (Section::Candidate, "edge_generators") => {
                if let Some(last) = candidates.last_mut() {
                    *last = Some(raw());
                }
            }
            (Section::Constants, k) => match k {
                "Q" => settings.q = Some(uint(value)?),
                "lambda" => settings.lambda = Some(rational(value)?),
                "epsilon" => settings.epsilon = Some(rational(value)?),
                "r" => settings.r = Some(uint(value)?),
                "K" => settings.k = Some(uint(value)?),
                "R" => settings.big_r = Some(uint(value)?),
                "ball_radius" => settings.ball_radius = Some(uint(value)? as usize),
                "budget" => settings.budget = Some(uint(value)? as usize),
                "delta" => settings.delta = Some(uint(value)?),
                "n" => settings.n = Some(uint(value)?),
                "a" => settings.a = Some(rational(value)?),
                "k1" => settings.k1 = Some(rational(value)?),
                "k2" => settings.k2 = Some(rational(value)?),
                "eta" => settings.eta = Some(uint(value)?),
                "mode" => settings.mode = Some(value.to_string()),
                "pad" => settings.pad = Some(uint(value)?),
                "oracle" => settings.oracle = Some(value.to_string()),
                "lonely" => settings.lonely = Some(value.to_string()),
                "comm_element" => settings.comm_element = Some(value.to_string()),
                "finite_index_subgroup" => settings.finite_index_subgroup = Some(words_list(value)),
                "ladder" => {
                    let mut rungs = Vec::new();
                    for part in value.split(';').filter(|p| !p.trim().is_empty()) {
                        let nums: Vec<&str> = part.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
                        if nums.len() != 3 {
                            return Err(syntax(line_no, value_col, "ladder rungs are 'r K R' separated by ';'"));
                        }
                        rungs.push((uint(nums[0])?, uint(nums[1])?, uint(nums[2])?));
                    }
                    settings.ladder = Some(rungs);
                }
                _ => return Err(syntax(line_no, indent + 1, format!("unknown key '{key}'"))),
            },
            _ => return Err(syntax(line_no, indent + 1, format!("unknown key '{key}'"))),
        }
    }

    let generators = generators.ok_or_else(|| syntax(1, 1, "missing 'generators' in [group]"))?;
    let symbols: Vec<char> = generators.value.split_whitespace().flat_map(|t| t.chars()).collect();
    for &c in &symbols {
        if !c.is_ascii_lowercase() {
            return Err(syntax(generators.line, generators.column, format!("generator '{c}' must be a lowercase letter")));
        }
    }
    let alphabet = Alphabet::new(symbols).map_err(|e| match e {
        Error::Syntax { message, .. } => syntax(generators.line, generators.column, message),
        other => other,
    })?;
    let rels = match &relators {
        Some(raw) => parse_words(&alphabet, raw)?,
        None => Vec::new(),
    };
    if let Some(raw) = &relators {
        for (i, w) in words_list(&raw.value).iter().enumerate() {
            if w.is_empty() {
                return Err(syntax(raw.line, raw.column, format!("relator {i} is empty")));
            }
        }
    }
    let presentation = GroupPresentation::new(name.unwrap_or_else(|| "G".into()), alphabet.clone(), rels)?;
    let subgroup = match &subgroup {
        Some(raw) => Some(parse_words(&alphabet, raw)?),
        None => None,
    };
    let candidates = candidates
        .iter()
        .flatten()
        .map(|raw| parse_words(&alphabet, raw))
        .collect::<Result<Vec<_>>>()?;
    Ok(InputFile {
        presentation,
        subgroup,
        settings,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::WordProblem;

    #[test]
    fn free_group_without_relators() {
        let p = parse_presentation("generators a b\nrelators (none)\n").unwrap();
        assert_eq!(p.alphabet().rank(), 2);
        assert!(p.relators().is_empty());
        assert_eq!(p.strategy(), WordProblem::FreeGroup);
    }

    #[test]
    fn genus_two_surface() {
        let p = parse_presentation("[group]\ngenerators = a b c d\nrelators = abABcdCD # genus 2\n").unwrap();
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.relators()[0].len(), 8);
        assert_eq!(p.strategy(), WordProblem::DehnSmallCancellation);
    }

    #[test]
    fn relator_reducing_to_empty() {
        let e = parse_presentation("generators a\nrelators aa, aA\n").unwrap_err();
        assert!(matches!(e, Error::EmptyRelator { index: 1, .. }), "{e:?}");
    }

    #[test]
    fn unpaired_letter_reports_position() {
        let e = parse_presentation("generators a b\nrelators abx\n").unwrap_err();
        match e {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_section_and_key() {
        assert!(matches!(parse_input("[grp]\n"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_input("generators a\nfoo = 1\n"),
            Err(Error::Syntax { line: 2, column: 1, .. })
        ));
    }

    #[test]
    fn full_file() {
        let text = "\
[group]
name = surface2
generators = a b c d
relators = abABcdCD
[subgroup]
generators = a
[constants]
Q = 0
lambda = 1
epsilon = 1/2
r = 1
K = 1
R = 2
ladder = 1 1 2; 2 2 4
[candidate]
edge_generators = a
";
        let f = parse_input(text).unwrap();
        assert_eq!(f.presentation.name(), "surface2");
        assert_eq!(f.subgroup.as_ref().unwrap().len(), 1);
        assert_eq!(f.settings.epsilon, Some(Ratio::new(1, 2)));
        assert_eq!(f.settings.ladder, Some(vec![(1, 1, 2), (2, 2, 4)]));
        assert_eq!(f.candidates.len(), 1);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1.5"), Some(Ratio::new(3, 2)));
        assert_eq!(parse_rational("2"), Some(Ratio::from_integer(2)));
        assert_eq!(parse_rational("-3/4"), Some(Ratio::new(-3, 4)));
        assert_eq!(parse_rational("x"), None);
    }
}
