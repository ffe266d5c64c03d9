//! GPVW tableau translation from NNF LTL to generalized Büchi automata.
//!
//! Each tableau node becomes one automaton state. A state's outgoing
//! transitions are guarded by the literals the node promises for the current
//! letter (its `old` literals); targets are the nodes it leads to. Initial
//! states are the nodes created directly from the root formula. There is one
//! acceptance set per `a U b` subformula: the nodes whose `old` contains `b`
//! or lacks `a U b` (every node, when `b` is `true`).

use std::collections::{BTreeSet, HashMap};

use super::{CheckError, CheckLimits};
use crate::logic::{Formula, LabelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub ap: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub guard: Vec<Literal>,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub alphabet: Vec<String>,
    pub state_count: usize,
    pub initial: Vec<usize>,
    pub transitions: Vec<Vec<Transition>>,
    /// Generalized acceptance; an empty list accepts every infinite run.
    pub acceptance_sets: Vec<Vec<usize>>,
}

/// Literal guard as masks over a label set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Guard {
    pub pos: u64,
    pub neg: u64,
}

impl Guard {
    pub fn of(lits: &[Literal]) -> Guard {
        let mut g = Guard { pos: 0, neg: 0 };
        for l in lits {
            if l.positive {
                g.pos |= 1 << l.ap;
            } else {
                g.neg |= 1 << l.ap;
            }
        }
        g
    }

    pub fn admits(self, l: LabelSet) -> bool {
        l.0 & self.pos == self.pos && l.0 & self.neg == 0
    }
}

impl BuchiAutomaton {
    /// Membership of `stem · cycle^ω` (letters given as label sets over this
    /// automaton's alphabet), decided by emptiness of the product with the
    /// word viewed as a single-path Kripke structure.
    pub fn accepts_lasso(
        &self,
        stem: &[LabelSet],
        cycle: &[LabelSet],
        limits: &CheckLimits,
    ) -> Result<bool, CheckError> {
        let k = super::ndfs::path_structure(&self.alphabet, stem, cycle);
        Ok(super::ndfs::find_accepting_lasso(&k, self, limits)?.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sub {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Arena {
    subs: Vec<Sub>,
    index: HashMap<Sub, usize>,
}

impl Arena {
    fn intern(&mut self, s: Sub) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        self.subs.push(s);
        self.index.insert(s, self.subs.len() - 1);
        self.subs.len() - 1
    }

    fn build(&mut self, f: &Formula, alphabet: &[String]) -> Result<usize, CheckError> {
        let ap = |name: &str| {
            alphabet
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| CheckError::UnknownAtom(name.to_string()))
        };
        let s = match f {
            Formula::True => Sub::True,
            Formula::False => Sub::False,
            Formula::Atom(a) => Sub::Lit(ap(a)?, true),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) => Sub::Lit(ap(a)?, false),
                _ => return Err(CheckError::NotNnf),
            },
            Formula::Implies(..) => return Err(CheckError::NotNnf),
            Formula::And(a, b) => Sub::And(self.build(a, alphabet)?, self.build(b, alphabet)?),
            Formula::Or(a, b) => Sub::Or(self.build(a, alphabet)?, self.build(b, alphabet)?),
            Formula::Next(a) => Sub::Next(self.build(a, alphabet)?),
            Formula::Finally(a) => {
                let t = self.intern(Sub::True);
                Sub::Until(t, self.build(a, alphabet)?)
            }
            Formula::Globally(a) => {
                let ff = self.intern(Sub::False);
                Sub::Release(ff, self.build(a, alphabet)?)
            }
            Formula::Until(a, b) => Sub::Until(self.build(a, alphabet)?, self.build(b, alphabet)?),
            Formula::Release(a, b) => {
                Sub::Release(self.build(a, alphabet)?, self.build(b, alphabet)?)
            }
        };
        Ok(self.intern(s))
    }
}

/// Tableau node still being expanded.
#[derive(Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

struct Node {
    incoming: BTreeSet<usize>,
    old: BTreeSet<usize>,
}

// Marker for "created from the root" in incoming sets.
const INIT: usize = usize::MAX;

/// Translates an NNF formula into a generalized Büchi automaton over
/// `alphabet`.
pub fn ltl_to_buchi(
    f: &Formula,
    alphabet: &[String],
    limits: &CheckLimits,
) -> Result<BuchiAutomaton, CheckError> {
    if alphabet.len() > 64 {
        return Err(CheckError::ResourceLimit {
            what: "alphabet size",
            limit: 64,
        });
    }
    let mut arena = Arena::default();
    let root = arena.build(f, alphabet)?;
    let subs = &arena.subs;

    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    let mut stack = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    let mut steps = 0usize;

    while let Some(mut node) = stack.pop() {
        steps += 1;
        if steps > limits.max_tableau_steps {
            return Err(CheckError::ResourceLimit {
                what: "tableau expansion steps",
                limit: limits.max_tableau_steps,
            });
        }
        let Some(eta) = node.new.pop_first() else {
            let key: (Vec<usize>, Vec<usize>) = (
                node.old.iter().copied().collect(),
                node.next.iter().copied().collect(),
            );
            if let Some(&id) = index.get(&key) {
                nodes[id].incoming.extend(node.incoming);
            } else {
                let id = nodes.len();
                if id >= limits.max_automaton_states {
                    return Err(CheckError::ResourceLimit {
                        what: "automaton states",
                        limit: limits.max_automaton_states,
                    });
                }
                nodes.push(Node {
                    incoming: node.incoming,
                    old: node.old,
                });
                index.insert(key.clone(), id);
                stack.push(Pending {
                    incoming: BTreeSet::from([id]),
                    new: key.1.into_iter().collect(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
            }
            continue;
        };
        let add_new = |node: &mut Pending, xs: &[usize]| {
            for &x in xs {
                if !node.old.contains(&x) {
                    node.new.insert(x);
                }
            }
        };
        match subs[eta] {
            Sub::True => stack.push(node),
            Sub::False => {}
            Sub::Lit(ap, pol) => {
                let clash = arena
                    .index
                    .get(&Sub::Lit(ap, !pol))
                    .is_some_and(|c| node.old.contains(c));
                if !clash {
                    node.old.insert(eta);
                    stack.push(node);
                }
            }
            Sub::And(a, b) => {
                add_new(&mut node, &[a, b]);
                node.old.insert(eta);
                stack.push(node);
            }
            Sub::Next(a) => {
                node.old.insert(eta);
                node.next.insert(a);
                stack.push(node);
            }
            Sub::Or(a, b) | Sub::Until(a, b) | Sub::Release(a, b) => {
                let (first_new, first_next, second_new): (Vec<usize>, bool, Vec<usize>) =
                    match subs[eta] {
                        Sub::Or(..) => (vec![a], false, vec![b]),
                        Sub::Until(..) => (vec![a], true, vec![b]),
                        _ => (vec![b], true, vec![a, b]),
                    };
                node.old.insert(eta);
                let mut second = node.clone();
                add_new(&mut second, &second_new);
                add_new(&mut node, &first_new);
                if first_next {
                    node.next.insert(eta);
                }
                stack.push(second);
                stack.push(node);
            }
        }
    }

    let n = nodes.len();
    let literals: Vec<Vec<Literal>> = nodes
        .iter()
        .map(|nd| {
            nd.old
                .iter()
                .filter_map(|&i| match subs[i] {
                    Sub::Lit(ap, positive) => Some(Literal { ap, positive }),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let mut transitions: Vec<Vec<Transition>> = vec![Vec::new(); n];
    let mut initial = Vec::new();
    for (target, nd) in nodes.iter().enumerate() {
        for &src in &nd.incoming {
            if src == INIT {
                initial.push(target);
            } else {
                transitions[src].push(Transition {
                    guard: literals[src].clone(),
                    target,
                });
            }
        }
    }
    for ts in transitions.iter_mut() {
        ts.sort_by_key(|t| t.target);
    }
    let acceptance_sets = subs
        .iter()
        .enumerate()
        .filter_map(|(u, s)| match *s {
            // `true` is never recorded in `old`, so a `true` right operand
            // counts as fulfilled everywhere.
            Sub::Until(_, b) => Some(
                (0..n)
                    .filter(|&q| {
                        subs[b] == Sub::True
                            || nodes[q].old.contains(&b)
                            || !nodes[q].old.contains(&u)
                    })
                    .collect(),
            ),
            _ => None,
        })
        .collect();

    Ok(BuchiAutomaton {
        alphabet: alphabet.to_vec(),
        state_count: n,
        initial,
        transitions,
        acceptance_sets,
    })
}
