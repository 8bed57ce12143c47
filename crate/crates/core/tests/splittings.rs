mod common;

use std::sync::Arc;

use hypsplit::cayley::build_ball;
use hypsplit::constants::{desk_constants, Parameters};
use hypsplit::ends::Answer;
use hypsplit::presentation::Word;
use hypsplit::splittings::{
    class_unions, commensurator_member, crossings_search, revalidate, verify_candidate_splitting, CrossingsResult,
    Membership,
};

use common::{ctx, free2, surface};

#[test]
fn candidate_equal_to_h_is_verified() {
    let cases: Vec<(Arc<hypsplit::presentation::GroupPresentation>, Vec<&str>)> = vec![
        (surface(), vec!["a"]),
        (surface(), vec!["ab"]),
        (surface(), vec!["a", "b", "c", "d"]),
        (free2(), vec!["a"]),
        (free2(), vec!["a", "baB", "bb"]),
    ];
    for (p, gens) in cases {
        let h = ctx(&p, &gens);
        let words: Vec<Word> = gens.iter().map(|s| p.word(s).unwrap()).collect();
        let (answer, _) = verify_candidate_splitting(&h, &words, 4, 20000).unwrap();
        assert_eq!(answer, Answer::Yes, "{gens:?}");
    }
}

#[test]
fn commensurator_is_coherent() {
    let p = free2();
    let h = ctx(&p, &["a"]);
    let samples = ["a", "A", "aa", "b", "ab", "ba", "bA", "aab"];
    let verdict = |s: &str| commensurator_member(&h, &p.word(s).unwrap(), 8, 20000).verdict;
    for x in samples {
        for y in samples {
            if verdict(x) == Membership::Member && verdict(y) == Membership::Member {
                let xy = format!("{x}{y}");
                assert_ne!(verdict(&xy), Membership::NonMember, "{xy}");
            }
        }
    }
    assert_eq!(verdict("a"), Membership::Member);
    assert_eq!(verdict("b"), Membership::NonMember);
}

#[test]
fn class_unions_skip_complements() {
    assert!(class_unions(1).is_empty());
    assert_eq!(class_unions(2), vec![vec![0]]);
    assert_eq!(class_unions(3).len(), 3);
}

#[test]
fn crossing_reports_are_honest() {
    let p = surface();
    let h = ctx(&p, &["ab"]);
    let c = desk_constants(&Parameters::default(), 1, 1, 2).unwrap();
    let b = build_ball(Arc::clone(&p), 6, 1 << 24).unwrap();
    let report = crossings_search(&b, &h, &c, 5, 1, 1, 3).unwrap();
    let certified: Vec<_> = report.progress.iter().filter_map(|u| u.certificate.as_ref()).collect();
    assert!(!certified.is_empty());
    for cert in certified {
        assert!(revalidate(&b, &h, cert).unwrap(), "{}", cert.g);
    }
    match report.result {
        CrossingsResult::AllCrossed => assert!(report.progress.iter().all(|u| u.certificate.is_some())),
        CrossingsResult::NoAlmostInvariantSet => assert!(report.progress.is_empty()),
        CrossingsResult::BudgetExhausted => assert!(report.progress.iter().any(|u| u.certificate.is_none())),
    }
}
