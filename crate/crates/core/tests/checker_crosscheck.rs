mod common;

use std::collections::BTreeSet;

use ltloracle::checker::{
    check, check_reference, eval_lasso, ltl_to_buchi, verify_counterexample, CheckLimits,
    LassoWord, Outcome,
};
use ltloracle::logic::{default_alphabet, random_formula, to_nnf, Formula, GenSpec, LabelSet};
use ltloracle::rng::SplitMix64;

use common::*;

#[test]
fn exhaustive_suite_size() {
    let ks = exhaustive_structures();
    // 2 + 57 + 3332 classes for 1, 2, 3 states, counted by an independent
    // brute-force enumeration.
    assert_eq!(ks.len(), 3391);
    assert!(ks.iter().all(|k| ltloracle::logic::validate_kripke(k).is_empty()));
}

#[test]
fn dual_checkers_agree_on_exhaustive_suite() {
    let fs = catalog();
    for k in exhaustive_structures() {
        for f in &fs {
            let a = check(&k, f).unwrap();
            let b = check_reference(&k, f).unwrap();
            assert_eq!(a.outcome(), b.outcome(), "{f} on {k:?}");
            assert!(verify_counterexample(&k, f, &a).unwrap(), "{f} on {k:?}");
            assert!(verify_counterexample(&k, f, &b).unwrap(), "{f} on {k:?}");
        }
    }
}

#[test]
fn dual_checkers_agree_on_random_instances() {
    for seed in 0..1000 {
        let (k, f) = random_instance(seed);
        let a = check(&k, &f).unwrap();
        let b = check_reference(&k, &f).unwrap();
        assert_eq!(a.outcome(), b.outcome(), "seed {seed}: {f}");
        assert!(verify_counterexample(&k, &f, &a).unwrap());
        assert!(verify_counterexample(&k, &f, &b).unwrap());
    }
}

#[test]
fn nnf_preserves_verdicts() {
    for seed in 0..300 {
        let (k, f) = random_instance(seed + 50_000);
        assert_eq!(
            check(&k, &f).unwrap().outcome(),
            check_reference(&k, &to_nnf(&f)).unwrap().outcome()
        );
    }
}

#[test]
fn negation_coherence_on_single_paths() {
    let fs = catalog();
    for k in exhaustive_structures().into_iter().filter(single_path) {
        for f in &fs {
            let pos = check(&k, f).unwrap().outcome() == Outcome::Holds;
            let neg = check(&k, &Formula::not(f.clone())).unwrap().outcome() == Outcome::Holds;
            assert!(pos ^ neg, "{f} on {k:?}");
        }
    }
}

#[test]
fn buchi_language_matches_lasso_semantics() {
    let ab = default_alphabet(2);
    let mut rng = SplitMix64::new(2024);
    for i in 0..1000 {
        let spec = GenSpec {
            seed: 7_000 + i,
            formula_length: 1 + rng.below(10),
            ..GenSpec::default()
        };
        let f = random_formula(&spec, &ab).unwrap();
        let (stem, cycle) = random_word(&mut rng);
        let a = ltl_to_buchi(&to_nnf(&f), &ab, &CheckLimits::default()).unwrap();
        let by_automaton = a.accepts_lasso(&stem, &cycle, &CheckLimits::default()).unwrap();
        let names = |l: &LabelSet| -> BTreeSet<String> {
            l.indices().map(|i| ab[i].clone()).collect()
        };
        let word = LassoWord {
            stem: stem.iter().map(names).collect(),
            cycle: cycle.iter().map(names).collect(),
        };
        assert_eq!(by_automaton, eval_lasso(&word, &f), "{f} on {word:?}");
    }
}
