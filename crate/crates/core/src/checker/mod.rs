//! Explicit-state LTL model checking.
//!
//! [`check`] is the automata-theoretic checker used for labeling: the
//! negated formula is translated to a generalized Büchi automaton with a
//! GPVW tableau, degeneralized on the fly with a round-robin counter, and the
//! product with the Kripke structure is searched for an accepting lasso with
//! nested depth-first search.
//!
//! [`check_reference`] reaches the same verdicts by a different route: it
//! enumerates maximal consistent subsets of the closure of the negated
//! formula, builds their product with the structure, and looks for a
//! reachable self-fulfilling strongly connected component.
//!
//! [`eval_lasso`] decides a formula on an ultimately periodic word and is the
//! judge for counterexamples.

mod buchi;
mod lasso;
mod ndfs;
mod reference;

use thiserror::Error;

use crate::logic::{to_nnf, validate_kripke, Formula, KripkeStructure, Violation};

pub use buchi::{ltl_to_buchi, BuchiAutomaton, Literal, Transition};
pub use lasso::{eval_lasso, lasso_word, verify_counterexample, verify_lasso, LassoWord};
pub use reference::check_reference_with;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("invalid Kripke structure: {}", render_violations(.0))]
    InvalidKripke(Vec<Violation>),
    #[error("atom `{0}` is not in the structure's alphabet")]
    UnknownAtom(String),
    #[error("formula is not in negation normal form")]
    NotNnf,
    #[error("resource limit exceeded: {what} above {limit}")]
    ResourceLimit { what: &'static str, limit: usize },
    #[error("malformed lasso: {0}")]
    MalformedLasso(String),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Per-call resource caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckLimits {
    pub max_automaton_states: usize,
    pub max_tableau_steps: usize,
    pub max_product_states: usize,
}

impl Default for CheckLimits {
    fn default() -> Self {
        CheckLimits {
            max_automaton_states: 2_000_000,
            max_tableau_steps: 20_000_000,
            max_product_states: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Violated,
}

impl Outcome {
    pub fn holds(self) -> bool {
        self == Outcome::Holds
    }

    pub fn from_holds(b: bool) -> Self {
        if b {
            Outcome::Holds
        } else {
            Outcome::Violated
        }
    }
}

/// Ultimately periodic run of a Kripke structure: `stem` then `cycle`
/// repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Lasso),
}

impl Verdict {
    pub fn outcome(&self) -> Outcome {
        match self {
            Verdict::Holds => Outcome::Holds,
            Verdict::Violated(_) => Outcome::Violated,
        }
    }

    pub fn counterexample(&self) -> Option<&Lasso> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(l) => Some(l),
        }
    }
}

pub(crate) fn ensure_checkable(k: &KripkeStructure, f: &Formula) -> Result<(), CheckError> {
    let v = validate_kripke(k);
    if !v.is_empty() {
        return Err(CheckError::InvalidKripke(v));
    }
    for a in f.atoms() {
        if k.ap_index(a).is_none() {
            return Err(CheckError::UnknownAtom(a.to_string()));
        }
    }
    Ok(())
}

/// Decides `k ⊨ f` with the default limits.
pub fn check(k: &KripkeStructure, f: &Formula) -> Result<Verdict, CheckError> {
    check_with(k, f, &CheckLimits::default())
}

pub fn check_with(
    k: &KripkeStructure,
    f: &Formula,
    limits: &CheckLimits,
) -> Result<Verdict, CheckError> {
    ensure_checkable(k, f)?;
    let negated = to_nnf(&Formula::not(f.clone()));
    let automaton = ltl_to_buchi(&negated, &k.alphabet, limits)?;
    match ndfs::find_accepting_lasso(k, &automaton, limits)? {
        None => Ok(Verdict::Holds),
        Some(lasso) => Ok(Verdict::Violated(lasso)),
    }
}

/// Independent oracle with the same contract as [`check`].
pub fn check_reference(k: &KripkeStructure, f: &Formula) -> Result<Verdict, CheckError> {
    check_reference_with(k, f, &CheckLimits::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_ltl, LabelSet};

    fn single_p() -> KripkeStructure {
        KripkeStructure {
            alphabet: vec!["p".into()],
            initial: vec![0],
            successors: vec![vec![0]],
            labels: vec![LabelSet::from_indices([0])],
        }
    }

    fn two_cycle() -> KripkeStructure {
        KripkeStructure {
            alphabet: vec!["p".into(), "q".into()],
            initial: vec![0],
            successors: vec![vec![1], vec![0]],
            labels: vec![LabelSet::from_indices([0]), LabelSet::from_indices([1])],
        }
    }

    fn f(text: &str, k: &KripkeStructure) -> Formula {
        parse_ltl(text, &k.alphabet).unwrap()
    }

    #[test]
    fn globally_p_holds_on_p_loop() {
        let k = single_p();
        assert_eq!(check(&k, &f("G p", &k)).unwrap(), Verdict::Holds);
        assert_eq!(check_reference(&k, &f("G p", &k)).unwrap(), Verdict::Holds);
    }

    #[test]
    fn eventually_not_p_violated_with_self_loop_lasso() {
        let k = single_p();
        let lasso = Lasso {
            stem: vec![],
            cycle: vec![0],
        };
        assert_eq!(
            check(&k, &f("F !p", &k)).unwrap(),
            Verdict::Violated(lasso.clone())
        );
        assert_eq!(
            check_reference(&k, &f("F !p", &k)).unwrap(),
            Verdict::Violated(lasso)
        );
    }

    #[test]
    fn response_on_two_cycle() {
        // The only path is (0 1)^ω with labels {p}{q}: every p is followed by q.
        let k = two_cycle();
        let g = f("G (p -> X q)", &k);
        assert_eq!(check(&k, &g).unwrap(), Verdict::Holds);
        assert_eq!(check_reference(&k, &g).unwrap(), Verdict::Holds);
        let bad = f("G (q -> X q)", &k);
        let v = check(&k, &bad).unwrap();
        assert_eq!(v.outcome(), Outcome::Violated);
        assert!(verify_counterexample(&k, &bad, &v).unwrap());
    }

    #[test]
    fn true_always_holds() {
        let k = two_cycle();
        assert_eq!(check(&k, &Formula::True).unwrap(), Verdict::Holds);
        assert_eq!(check_reference(&k, &Formula::True).unwrap(), Verdict::Holds);
        assert_eq!(
            check(&k, &Formula::False).unwrap().outcome(),
            Outcome::Violated
        );
    }

    #[test]
    fn unknown_atom_and_invalid_structure() {
        let k = single_p();
        assert_eq!(
            check(&k, &Formula::atom("z")),
            Err(CheckError::UnknownAtom("z".into()))
        );
        let mut bad = single_p();
        bad.successors[0].clear();
        assert!(matches!(
            check(&bad, &Formula::True),
            Err(CheckError::InvalidKripke(_))
        ));
        assert!(matches!(
            check_reference(&bad, &Formula::True),
            Err(CheckError::InvalidKripke(_))
        ));
    }

    #[test]
    fn product_cap_reports_resource_limit() {
        let k = two_cycle();
        let limits = CheckLimits {
            max_product_states: 1,
            ..CheckLimits::default()
        };
        let r = check_with(&k, &f("G F p", &k), &limits);
        assert!(matches!(r, Err(CheckError::ResourceLimit { .. })));
        let r = check_reference_with(&k, &f("G F p", &k), &limits);
        assert!(matches!(r, Err(CheckError::ResourceLimit { .. })));
    }

    #[test]
    fn deterministic_counterexamples() {
        let k = two_cycle();
        let g = f("F G p", &k);
        assert_eq!(check(&k, &g).unwrap(), check(&k, &g).unwrap());
    }
}
