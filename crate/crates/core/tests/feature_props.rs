mod common;

use ltloracle::features::{apply_scaler, extract, fit_scaler, DIM};
use ltloracle::logic::{Formula, KripkeStructure, LabelSet};
use ltloracle::rng::SplitMix64;
use proptest::prelude::*;

fn reindex(k: &KripkeStructure, perm: &[usize]) -> KripkeStructure {
    let n = k.state_count();
    let mut successors = vec![Vec::new(); n];
    let mut labels = vec![LabelSet::EMPTY; n];
    for s in 0..n {
        successors[perm[s]] = k.successors[s].iter().map(|&t| perm[t]).collect();
        labels[perm[s]] = k.labels[s];
    }
    KripkeStructure {
        alphabet: k.alphabet.clone(),
        initial: k.initial.iter().map(|&s| perm[s]).collect(),
        successors,
        labels,
    }
}

fn rename(f: &Formula, from: &[String], to: &[String]) -> Formula {
    use Formula::*;
    let r = |x: &Formula| Box::new(rename(x, from, to));
    match f {
        Atom(a) => Atom(to[from.iter().position(|x| x == a).unwrap()].clone()),
        True => True,
        False => False,
        Not(a) => Not(r(a)),
        Next(a) => Next(r(a)),
        Finally(a) => Finally(r(a)),
        Globally(a) => Globally(r(a)),
        And(a, b) => And(r(a), r(b)),
        Or(a, b) => Or(r(a), r(b)),
        Implies(a, b) => Implies(r(a), r(b)),
        Until(a, b) => Until(r(a), r(b)),
        Release(a, b) => Release(r(a), r(b)),
    }
}

proptest! {
    #[test]
    fn invariant_under_state_reindexing(seed in 0u64..1_000_000, pseed: u64) {
        let (k, f) = common::random_instance(seed);
        let perm = SplitMix64::new(pseed).sample_indices(k.state_count(), k.state_count());
        let v = extract(&k, &f);
        prop_assert_eq!(v.values.len(), DIM);
        prop_assert!(v.values.iter().all(|x| x.is_finite()));
        prop_assert_eq!(v, extract(&reindex(&k, &perm), &f));
    }

    #[test]
    fn invariant_under_ap_renaming(seed in 0u64..1_000_000) {
        let (k, f) = common::random_instance(seed);
        let to = vec!["alpha".to_string(), "beta".to_string()];
        let mut k2 = k.clone();
        k2.alphabet = to.clone();
        let f2 = rename(&f, &k.alphabet, &to);
        prop_assert_eq!(extract(&k, &f), extract(&k2, &f2));
    }

    #[test]
    fn scaler_standardizes_its_fit_set(
        rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 1..40)
    ) {
        let s = fit_scaler(&rows);
        prop_assert!(s.std.iter().all(|&x| x > 0.0));
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| apply_scaler(&s, r)).collect();
        let m = rows.len() as f64;
        for j in 0..3 {
            let mean = scaled.iter().map(|r| r[j]).sum::<f64>() / m;
            prop_assert!(mean.abs() < 1e-9, "mean {}", mean);
            let var = scaled.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / m;
            let constant = rows.iter().all(|r| r[j] == rows[0][j]);
            if !constant {
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-9, "std {}", var.sqrt());
            }
        }
    }
}
