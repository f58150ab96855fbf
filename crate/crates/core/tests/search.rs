use std::collections::BTreeSet;

use rspir::search::{
    candidate_answers, canonical_form, search_schemes, search_schemes_from, SearchError,
    SearchSpace,
};
use rspir::{build_pairwise_scheme, serialize_scheme, verify, Field, LinearAnswer, Scheme};

#[test]
fn no_common_randomness_means_no_scheme() {
    let space = SearchSpace::square(2, 1, 0, Field::GF2, 2);
    let outcome = search_schemes(&space, 1_000_000).unwrap();
    assert!(outcome.is_exhausted_with_none());
}

#[test]
fn one_randomness_symbol_rediscovers_the_pairwise_construction() {
    let space = SearchSpace::square(2, 1, 1, Field::GF2, 1);
    let outcome = search_schemes(&space, 1_000_000).unwrap();
    let target = serialize_scheme(&canonical_form(
        &build_pairwise_scheme(2, Field::GF2).unwrap(),
    ));
    let found: Vec<String> = outcome.schemes().iter().map(serialize_scheme).collect();
    assert!(found.contains(&target), "found:\n{}", found.join("\n"));
    for s in outcome.schemes() {
        assert!(verify(s).unwrap().all_checks_pass());
    }
}

#[test]
fn non_multiple_answer_counts_are_pruned_immediately() {
    let mut space = SearchSpace::square(2, 1, 1, Field::GF2, 1);
    space.m1 = 3;
    let outcome = search_schemes(&space, 10).unwrap();
    assert!(outcome.is_exhausted_with_none());
    assert_eq!(outcome.nodes(), 0);
}

fn scheme_from(
    space: &SearchSpace,
    a: &[usize],
    b: &[usize],
    cands: &[rspir::FieldMatrix],
) -> Scheme {
    let set = |idx: &[usize]| {
        idx.iter()
            .enumerate()
            .map(|(index, &c)| LinearAnswer {
                index,
                map: cands[c].clone(),
            })
            .collect()
    };
    Scheme {
        k: space.k,
        l: space.l,
        r: space.r,
        field: space.field,
        db1: set(a),
        db2: set(b),
    }
}

/// Verifies every ordered assignment of candidate answers with the
/// enumeration verifier, no pruning, and collects canonical forms.
fn brute_force(space: &SearchSpace) -> BTreeSet<String> {
    let cands = candidate_answers(space.field, space.width(), space.max_len).unwrap();
    let n = cands.len();
    let mut out = BTreeSet::new();
    for code in 0..n.pow(4) {
        let idx = [code % n, code / n % n, code / n / n % n, code / n / n / n];
        let s = scheme_from(space, &idx[..2], &idx[2..], &cands);
        if verify(&s).unwrap().all_checks_pass() {
            out.insert(serialize_scheme(&canonical_form(&s)));
        }
    }
    out
}

#[test]
fn search_matches_brute_force_on_a_tiny_space() {
    for space in [
        SearchSpace::square(2, 1, 1, Field::GF2, 1),
        SearchSpace::square(2, 1, 0, Field::GF2, 2),
    ] {
        let expected = brute_force(&space);
        let got: BTreeSet<String> = search_schemes(&space, u64::MAX)
            .unwrap()
            .schemes()
            .iter()
            .map(serialize_scheme)
            .collect();
        assert_eq!(got, expected);
    }
}

#[test]
fn budget_error_resumes_to_the_same_result() {
    let space = SearchSpace::square(2, 1, 1, Field::GF2, 1);
    let full: BTreeSet<String> = search_schemes(&space, u64::MAX)
        .unwrap()
        .schemes()
        .iter()
        .map(serialize_scheme)
        .collect();
    let mut collected = BTreeSet::new();
    let mut cursor = None;
    let mut rounds = 0;
    loop {
        rounds += 1;
        match search_schemes_from(&space, 7, cursor.as_ref()) {
            Ok(outcome) => {
                collected.extend(outcome.schemes().iter().map(serialize_scheme));
                break;
            }
            Err(SearchError::BudgetExceeded {
                found, cursor: c, ..
            }) => {
                collected.extend(found.iter().map(serialize_scheme));
                cursor = Some(c);
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(rounds > 1);
    assert_eq!(collected, full);
}

#[test]
fn k3_search_finds_rate_one_third_schemes() {
    let space = SearchSpace::square(3, 1, 2, Field::GF2, 2);
    match search_schemes(&space, 5_000_000) {
        Ok(outcome) => {
            assert!(!outcome.schemes().is_empty());
            for s in outcome.schemes() {
                assert!(verify(s).unwrap().all_checks_pass());
            }
        }
        Err(SearchError::BudgetExceeded { found, .. }) => {
            for s in &found {
                assert!(verify(s).unwrap().all_checks_pass());
            }
        }
        Err(e) => panic!("{e}"),
    }
}
