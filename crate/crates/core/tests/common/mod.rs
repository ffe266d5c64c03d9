//! Instance suites shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use ltloracle::learners::{loss_and_gradient, LrModel};
use ltloracle::logic::{
    parse_ltl, random_formula, random_kripke, Formula, GenSpec, KripkeStructure, LabelSet,
};
use ltloracle::rng::SplitMix64;

/// Nonempty subsets of `0..n` as sorted index lists.
fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut out);
    out
}

fn permute(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, out);
        p.swap(k, i);
    }
}

type Key = (Vec<usize>, Vec<Vec<usize>>, Vec<u64>);

fn relabel(k: &KripkeStructure, perm: &[usize]) -> Key {
    let n = k.state_count();
    let mut init: Vec<usize> = k.initial.iter().map(|&s| perm[s]).collect();
    init.sort_unstable();
    let mut succ = vec![Vec::new(); n];
    let mut labels = vec![0; n];
    for s in 0..n {
        let mut t: Vec<usize> = k.successors[s].iter().map(|&x| perm[x]).collect();
        t.sort_unstable();
        succ[perm[s]] = t;
        labels[perm[s]] = k.labels[s].0;
    }
    (init, succ, labels)
}

/// Every total Kripke structure over one proposition with at most three
/// states, one representative per isomorphism class.
pub fn exhaustive_structures() -> Vec<KripkeStructure> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let subsets = nonempty_subsets(n);
        let perms = permutations(n);
        let mut seen: BTreeSet<Key> = BTreeSet::new();
        let mut choice = vec![0usize; n];
        loop {
            for init in &subsets {
                for labels in 0u32..(1 << n) {
                    let k = KripkeStructure {
                        alphabet: vec!["p".into()],
                        initial: init.clone(),
                        successors: choice.iter().map(|&c| subsets[c].clone()).collect(),
                        labels: (0..n)
                            .map(|s| LabelSet((labels >> s) as u64 & 1))
                            .collect(),
                    };
                    let canon = perms.iter().map(|p| relabel(&k, p)).min().unwrap();
                    if seen.insert(canon) {
                        out.push(k);
                    }
                }
            }
            // next successor assignment (odometer)
            let mut i = 0;
            while i < n {
                choice[i] += 1;
                if choice[i] < subsets.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

/// Thirty single-proposition templates with at most three temporal operators.
pub const FORMULA_CATALOG: [&str; 30] = [
    "p",
    "!p",
    "X p",
    "F p",
    "G p",
    "G F p",
    "F G p",
    "p U !p",
    "!p U p",
    "p R !p",
    "X X p",
    "X !p",
    "G (p -> X !p)",
    "G (p -> X p)",
    "G (p -> F !p)",
    "F (p & X p)",
    "F (p & X !p)",
    "G (p | X p)",
    "F p & F !p",
    "G F p -> F p",
    "X G p",
    "G X p",
    "p U X p",
    "X p U p",
    "F G !p",
    "X (p U !p)",
    "G !p",
    "p -> X X p",
    "true U p",
    "G p | G !p",
];

pub fn catalog() -> Vec<Formula> {
    FORMULA_CATALOG
        .iter()
        .map(|t| parse_ltl(t, &["p".to_string()]).unwrap())
        .collect()
}

/// Seeded random instance: 1..=6 states, 2 propositions, formula length
/// 1..=15.
pub fn random_instance(seed: u64) -> (KripkeStructure, Formula) {
    let mut rng = SplitMix64::stream(seed, 99);
    let spec = GenSpec {
        seed,
        state_range: (1, 6),
        ap_count: 2,
        edge_density: 0.4,
        formula_length: 1 + rng.below(15),
        ..GenSpec::default()
    };
    let k = random_kripke(&spec).unwrap();
    let f = random_formula(&spec, &k.alphabet).unwrap();
    (k, f)
}

/// Random lasso word over `p, q` with total length 1..=8.
pub fn random_word(rng: &mut SplitMix64) -> (Vec<LabelSet>, Vec<LabelSet>) {
    let total = 1 + rng.below(8);
    let stem_len = rng.below(total);
    let letters: Vec<LabelSet> = (0..total).map(|_| LabelSet(rng.below(4) as u64)).collect();
    (letters[..stem_len].to_vec(), letters[stem_len..].to_vec())
}

pub fn single_path(k: &KripkeStructure) -> bool {
    k.initial.len() == 1 && k.successors.iter().all(|s| s.len() == 1)
}

/// Central differences with ε = 1e-5 against the analytic gradient.
pub fn max_fd_relative_error(seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let n = 5 + rng.below(20);
    let d = 1 + rng.below(8);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.next_f64() * 4.0 - 2.0).collect())
        .collect();
    let y: Vec<u8> = (0..n).map(|_| u8::from(rng.bernoulli(0.5))).collect();
    let l2 = if rng.bernoulli(0.5) { 0.0 } else { rng.next_f64() };
    let m = LrModel {
        weights: (0..d).map(|_| rng.next_f64() * 2.0 - 1.0).collect(),
        bias: rng.next_f64() - 0.5,
    };
    let (_, gw, gb) = loss_and_gradient(&m, &x, &y, l2);
    let eps = 1e-5;
    let rel = |a: f64, num: f64| (a - num).abs() / a.abs().max(num.abs()).max(1e-8);
    let mut worst: f64 = 0.0;
    for j in 0..=d {
        let mut plus = m.clone();
        let mut minus = m.clone();
        if j < d {
            plus.weights[j] += eps;
            minus.weights[j] -= eps;
        } else {
            plus.bias += eps;
            minus.bias -= eps;
        }
        let num = (loss_and_gradient(&plus, &x, &y, l2).0
            - loss_and_gradient(&minus, &x, &y, l2).0)
            / (2.0 * eps);
        let a = if j < d { gw[j] } else { gb };
        worst = worst.max(rel(a, num));
    }
    worst
}

/// Expected emitter output stored under `tests/golden`.
pub fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(p).unwrap()
}

/// One self-looping state where `p` always holds; `G p` holds.
pub fn fixture_a() -> (KripkeStructure, Formula) {
    let k = KripkeStructure {
        alphabet: vec!["p".into()],
        initial: vec![0],
        successors: vec![vec![0]],
        labels: vec![LabelSet::from_indices([0])],
    };
    let f = parse_ltl("G p", &k.alphabet).unwrap();
    (k, f)
}

/// Three states, two initial, release nested under `G`.
pub fn fixture_b() -> (KripkeStructure, Formula) {
    let k = KripkeStructure {
        alphabet: vec!["p".into(), "q".into(), "r".into()],
        initial: vec![0, 2],
        successors: vec![vec![1], vec![0, 2], vec![2]],
        labels: vec![
            LabelSet::from_indices([0]),
            LabelSet::from_indices([1]),
            LabelSet::from_indices([0]),
        ],
    };
    let f = parse_ltl("G ((p -> X q) R F !r)", &k.alphabet).unwrap();
    (k, f)
}
