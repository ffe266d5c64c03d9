//! Product of a Kripke structure with a Büchi automaton, degeneralized by a
//! round-robin counter and searched with nested depth-first search.
//!
//! Product states are `(s, q, c)`. From `(s, q, c)` the product moves to
//! `(s', q', c')` when `s -> s'` in the structure, `q --g--> q'` in the
//! automaton with `L(s)` admitting `g`, and `c' = (c + 1) mod k` if `q` is in
//! acceptance set `c` (else `c' = c`). `(s, q, 0)` is accepting when `q` is in
//! set 0; with no acceptance sets every state is accepting. Successors are
//! explored in structure-successor order, then transition order, so the
//! first lasso found is deterministic.

use std::collections::{HashMap, HashSet};

use super::buchi::{BuchiAutomaton, Guard};
use super::{CheckError, CheckLimits, Lasso};
use crate::logic::{KripkeStructure, LabelSet};

type PState = (u32, u32, u32);

struct Product<'a> {
    k: &'a KripkeStructure,
    trans: Vec<Vec<(Guard, usize)>>,
    // Conjunction of a state's outgoing guards; states whose filter rejects
    // the current label have no successors and are never generated.
    entry: Vec<Option<Guard>>,
    accepting: Vec<Vec<bool>>,
    ids: HashMap<PState, u32>,
    cap: usize,
}

impl<'a> Product<'a> {
    fn new(k: &'a KripkeStructure, a: &BuchiAutomaton, cap: usize) -> Self {
        let trans: Vec<Vec<(Guard, usize)>> = a
            .transitions
            .iter()
            .map(|ts| ts.iter().map(|t| (Guard::of(&t.guard), t.target)).collect())
            .collect();
        let entry = trans
            .iter()
            .map(|ts| {
                ts.iter().map(|(g, _)| *g).reduce(|x, y| Guard {
                    pos: x.pos & y.pos,
                    neg: x.neg & y.neg,
                })
            })
            .collect();
        let accepting = a
            .acceptance_sets
            .iter()
            .map(|set| {
                let mut v = vec![false; a.state_count];
                for &q in set {
                    v[q] = true;
                }
                v
            })
            .collect();
        Product {
            k,
            trans,
            entry,
            accepting,
            ids: HashMap::new(),
            cap,
        }
    }

    fn admits(&self, q: usize, l: LabelSet) -> bool {
        self.entry[q].is_some_and(|g| g.admits(l))
    }

    fn discover(&mut self, p: PState) -> Result<bool, CheckError> {
        if self.ids.contains_key(&p) {
            return Ok(false);
        }
        if self.ids.len() >= self.cap {
            return Err(CheckError::ResourceLimit {
                what: "product states",
                limit: self.cap,
            });
        }
        let id = self.ids.len() as u32;
        self.ids.insert(p, id);
        Ok(true)
    }

    fn initial(&self, a: &BuchiAutomaton) -> Vec<PState> {
        let mut out = Vec::new();
        for &s in &self.k.initial {
            for &q in &a.initial {
                if self.admits(q, self.k.labels[s]) {
                    out.push((s as u32, q as u32, 0));
                }
            }
        }
        out
    }

    fn is_accepting(&self, (_, q, c): PState) -> bool {
        self.accepting.is_empty() || (c == 0 && self.accepting[0][q as usize])
    }

    fn successors(&self, (s, q, c): PState) -> Vec<PState> {
        let (s, q) = (s as usize, q as usize);
        let label = self.k.labels[s];
        let kc = self.accepting.len();
        let c2 = if kc > 0 && self.accepting[c as usize][q] {
            ((c as usize + 1) % kc) as u32
        } else {
            c
        };
        let mut out = Vec::new();
        for &s2 in &self.k.successors[s] {
            let l2 = self.k.labels[s2];
            for &(g, q2) in &self.trans[q] {
                if g.admits(label) && self.admits(q2, l2) {
                    out.push((s2 as u32, q2 as u32, c2));
                }
            }
        }
        out
    }
}

struct Frame {
    state: PState,
    succ: Vec<PState>,
    next: usize,
}

/// First accepting lasso of the product, projected onto structure states.
pub(crate) fn find_accepting_lasso(
    k: &KripkeStructure,
    a: &BuchiAutomaton,
    limits: &CheckLimits,
) -> Result<Option<Lasso>, CheckError> {
    let mut prod = Product::new(k, a, limits.max_product_states);
    let mut inner_seen: HashSet<PState> = HashSet::new();

    for init in prod.initial(a) {
        if !prod.discover(init)? {
            continue;
        }
        let mut outer = vec![Frame {
            state: init,
            succ: prod.successors(init),
            next: 0,
        }];
        while let Some(top) = outer.last_mut() {
            if top.next < top.succ.len() {
                let t = top.succ[top.next];
                top.next += 1;
                if prod.discover(t)? {
                    let succ = prod.successors(t);
                    outer.push(Frame {
                        state: t,
                        succ,
                        next: 0,
                    });
                }
                continue;
            }
            let seed = outer.pop().expect("nonempty").state;
            if !prod.is_accepting(seed) {
                continue;
            }
            if let Some(cycle) = inner_search(&prod, seed, &mut inner_seen) {
                let stem = outer.iter().map(|f| f.state.0 as usize).collect();
                let cycle = cycle.iter().map(|p| p.0 as usize).collect();
                return Ok(Some(Lasso { stem, cycle }));
            }
        }
    }
    Ok(None)
}

/// Searches for a path from `seed` back to itself; returns the cycle's
/// states starting at `seed`.
fn inner_search(
    prod: &Product<'_>,
    seed: PState,
    seen: &mut HashSet<PState>,
) -> Option<Vec<PState>> {
    seen.insert(seed);
    let mut stack = vec![Frame {
        state: seed,
        succ: prod.successors(seed),
        next: 0,
    }];
    while let Some(top) = stack.last_mut() {
        if top.next < top.succ.len() {
            let t = top.succ[top.next];
            top.next += 1;
            if t == seed {
                return Some(stack.iter().map(|f| f.state).collect());
            }
            if seen.insert(t) {
                let succ = prod.successors(t);
                stack.push(Frame {
                    state: t,
                    succ,
                    next: 0,
                });
            }
            continue;
        }
        stack.pop();
    }
    None
}

/// Single-path structure reading `stem · cycle^ω`.
pub(crate) fn path_structure(
    alphabet: &[String],
    stem: &[LabelSet],
    cycle: &[LabelSet],
) -> KripkeStructure {
    let n = stem.len() + cycle.len();
    let successors = (0..n)
        .map(|i| vec![if i + 1 < n { i + 1 } else { stem.len() }])
        .collect();
    KripkeStructure {
        alphabet: alphabet.to_vec(),
        initial: vec![0],
        successors,
        labels: stem.iter().chain(cycle).copied().collect(),
    }
}
