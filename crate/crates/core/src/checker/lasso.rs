use std::collections::BTreeSet;

use super::{CheckError, Lasso, Verdict};
use crate::logic::{Formula, KripkeStructure};

/// Infinite word `stem · cycle^ω` over sets of proposition names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub stem: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl LassoWord {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn letter(&self, i: usize) -> &BTreeSet<String> {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[i - self.stem.len()]
        }
    }
}

/// Truth of `f` at position 0 of `word`. Panics if the cycle is empty.
pub fn eval_lasso(word: &LassoWord, f: &Formula) -> bool {
    assert!(!word.cycle.is_empty(), "lasso word needs a nonempty cycle");
    let n = word.len();
    let ev = Evaluator {
        n,
        loop_start: word.stem.len(),
        word,
    };
    ev.eval(f)[0]
}

struct Evaluator<'a> {
    n: usize,
    loop_start: usize,
    word: &'a LassoWord,
}

impl Evaluator<'_> {
    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.n {
            i + 1
        } else {
            self.loop_start
        }
    }

    /// Truth value of `f` at every position of the lasso.
    fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.n;
        match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(a) => (0..n).map(|i| self.word.letter(i).contains(a)).collect(),
            Formula::Not(a) => self.eval(a).into_iter().map(|x| !x).collect(),
            Formula::And(a, b) => zip(self.eval(a), self.eval(b), |x, y| x && y),
            Formula::Or(a, b) => zip(self.eval(a), self.eval(b), |x, y| x || y),
            Formula::Implies(a, b) => zip(self.eval(a), self.eval(b), |x, y| !x || y),
            Formula::Next(a) => {
                let v = self.eval(a);
                (0..n).map(|i| v[self.succ(i)]).collect()
            }
            Formula::Finally(a) => self.until(&vec![true; n], &self.eval(a)),
            Formula::Globally(a) => self.release(&vec![false; n], &self.eval(a)),
            Formula::Until(a, b) => self.until(&self.eval(a), &self.eval(b)),
            Formula::Release(a, b) => self.release(&self.eval(a), &self.eval(b)),
        }
    }

    // Least fixpoint of v[i] = b[i] || (a[i] && v[succ i]).
    fn until(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.n];
        loop {
            let mut changed = false;
            for i in (0..self.n).rev() {
                let x = b[i] || (a[i] && v[self.succ(i)]);
                if x != v[i] {
                    v[i] = x;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    // Greatest fixpoint of v[i] = b[i] && (a[i] || v[succ i]).
    fn release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut v = vec![true; self.n];
        loop {
            let mut changed = false;
            for i in (0..self.n).rev() {
                let x = b[i] && (a[i] || v[self.succ(i)]);
                if x != v[i] {
                    v[i] = x;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// The word read along a lasso of `k`.
pub fn lasso_word(k: &KripkeStructure, lasso: &Lasso) -> LassoWord {
    let letter = |s: &usize| -> BTreeSet<String> {
        k.label_names(*s).into_iter().map(str::to_string).collect()
    };
    LassoWord {
        stem: lasso.stem.iter().map(letter).collect(),
        cycle: lasso.cycle.iter().map(letter).collect(),
    }
}

fn check_lasso_shape(k: &KripkeStructure, lasso: &Lasso) -> Result<(), CheckError> {
    let bad = |m: String| Err(CheckError::MalformedLasso(m));
    if lasso.cycle.is_empty() {
        return bad("empty cycle".into());
    }
    let n = k.state_count();
    let path: Vec<usize> = lasso.stem.iter().chain(&lasso.cycle).copied().collect();
    if let Some(s) = path.iter().find(|&&s| s >= n) {
        return bad(format!("state {s} out of range"));
    }
    if !k.initial.contains(&path[0]) {
        return bad(format!("first state {} is not initial", path[0]));
    }
    for w in path.windows(2) {
        if !k.is_edge(w[0], w[1]) {
            return bad(format!("{} -> {} is not an edge", w[0], w[1]));
        }
    }
    let (last, first) = (*lasso.cycle.last().unwrap(), lasso.cycle[0]);
    if !k.is_edge(last, first) {
        return bad(format!("cycle does not close: {last} -> {first} is not an edge"));
    }
    Ok(())
}

/// True iff `lasso` is a run of `k` whose word falsifies `f`.
pub fn verify_lasso(k: &KripkeStructure, f: &Formula, lasso: &Lasso) -> Result<bool, CheckError> {
    check_lasso_shape(k, lasso)?;
    Ok(!eval_lasso(&lasso_word(k, lasso), f))
}

/// Checks a verdict's counterexample; `Holds` passes vacuously.
pub fn verify_counterexample(
    k: &KripkeStructure,
    f: &Formula,
    verdict: &Verdict,
) -> Result<bool, CheckError> {
    match verdict {
        Verdict::Holds => Ok(true),
        Verdict::Violated(lasso) => verify_lasso(k, f, lasso),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_ltl, LabelSet};

    fn letters(spec: &[&[&str]]) -> Vec<BTreeSet<String>> {
        spec.iter()
            .map(|l| l.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    fn ev(stem: &[&[&str]], cycle: &[&[&str]], text: &str) -> bool {
        let w = LassoWord {
            stem: letters(stem),
            cycle: letters(cycle),
        };
        eval_lasso(&w, &parse_ltl(text, &["p".into(), "q".into()]).unwrap())
    }

    #[test]
    fn globally_on_constant_word() {
        assert!(ev(&[], &[&["p"]], "G p"));
        assert!(!ev(&[], &[&["p"], &[]], "G p"));
    }

    #[test]
    fn recurrence() {
        assert!(ev(&[], &[&["p"], &[]], "G F p"));
        assert!(!ev(&[], &[&["p"], &[]], "F G p"));
        assert!(ev(&[&[]], &[&["p"]], "F G p"));
    }

    #[test]
    fn eventually_after_stem() {
        assert!(ev(&[&[]], &[&["p"]], "true U p"));
        assert!(!ev(&[&[]], &[&[]], "F p"));
    }

    #[test]
    fn until_and_release_through_loop_back() {
        // p holds until the loop's second letter delivers q.
        assert!(ev(&[&["p"]], &[&["p"], &["q"]], "p U q"));
        assert!(!ev(&[&["p"]], &[&[], &["q"]], "p U q"));
        // q R p: p must hold forever since q never does.
        assert!(ev(&[], &[&["p"]], "q R p"));
        assert!(!ev(&[], &[&["p"], &[]], "q R p"));
        assert!(ev(&[], &[&["p", "q"], &[]], "q R p"));
    }

    #[test]
    fn next_wraps_to_loop_start() {
        assert!(ev(&[&[]], &[&["p"]], "X X X p"));
        assert!(ev(&[&["q"]], &[&["p"], &[]], "X X !p"));
    }

    fn chain() -> KripkeStructure {
        KripkeStructure {
            alphabet: vec!["p".into()],
            initial: vec![0],
            successors: vec![vec![1], vec![1]],
            labels: vec![LabelSet::EMPTY, LabelSet::from_indices([0])],
        }
    }

    #[test]
    fn malformed_lassos() {
        let k = chain();
        let f = Formula::atom("p");
        let non_edge = Lasso {
            stem: vec![1],
            cycle: vec![0],
        };
        assert!(matches!(
            verify_lasso(&k, &f, &non_edge),
            Err(CheckError::MalformedLasso(_))
        ));
        let empty = Lasso {
            stem: vec![0],
            cycle: vec![],
        };
        assert!(verify_lasso(&k, &f, &empty).is_err());
        let not_initial = Lasso {
            stem: vec![],
            cycle: vec![1],
        };
        assert!(verify_lasso(&k, &f, &not_initial).is_err());
        let open = Lasso {
            stem: vec![],
            cycle: vec![0, 1],
        };
        assert!(verify_lasso(&k, &f, &open).is_err());
    }

    #[test]
    fn genuine_counterexample() {
        let k = chain();
        let lasso = Lasso {
            stem: vec![0],
            cycle: vec![1],
        };
        assert!(verify_lasso(&k, &Formula::atom("p"), &lasso).unwrap());
        assert!(!verify_lasso(&k, &parse_ltl("F p", &k.alphabet).unwrap(), &lasso).unwrap());
        assert!(verify_counterexample(&k, &Formula::True, &Verdict::Holds).unwrap());
    }
}
