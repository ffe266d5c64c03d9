//! Declarative closure tableau, used as an independent oracle for
//! [`super::check`].
//!
//! The negated formula is rewritten over `{true, p, !, &, X, U}`. An atom is
//! a truth assignment to the closure that is locally consistent with a
//! state's label (`a U b` is true when `b` is, false when neither `a` nor `b`
//! is, free otherwise; `X a` is free). `(s, A) -> (s', B)` is an edge when
//! `s -> s'` and `B` honours every `X` obligation of `A` and carries forward
//! every `a U b` of `A` that is still pending. A violation exists iff some
//! initial node containing the negated formula reaches a nontrivial strongly
//! connected component in which every `a U b` that appears is fulfilled by
//! some node containing `b`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{ensure_checkable, CheckError, CheckLimits, Lasso, Verdict};
use crate::logic::{Formula, KripkeStructure, LabelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Ref {
    idx: usize,
    neg: bool,
}

impl Ref {
    fn flip(self) -> Ref {
        Ref {
            idx: self.idx,
            neg: !self.neg,
        }
    }

    fn eval(self, bits: u128) -> bool {
        ((bits >> self.idx) & 1 == 1) ^ self.neg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Core {
    True,
    Ap(usize),
    And(Ref, Ref),
    Next(Ref),
    Until(Ref, Ref),
}

const MAX_CLOSURE: usize = 128;

#[derive(Default)]
struct Closure {
    nodes: Vec<Core>,
    index: HashMap<Core, usize>,
}

impl Closure {
    fn intern(&mut self, c: Core) -> Ref {
        let idx = *self.index.entry(c).or_insert_with(|| {
            self.nodes.push(c);
            self.nodes.len() - 1
        });
        Ref { idx, neg: false }
    }

    fn lower(&mut self, f: &Formula, k: &KripkeStructure) -> Ref {
        match f {
            Formula::True => self.intern(Core::True),
            Formula::False => self.intern(Core::True).flip(),
            Formula::Atom(a) => self.intern(Core::Ap(k.ap_index(a).expect("checked atom"))),
            Formula::Not(a) => self.lower(a, k).flip(),
            Formula::And(a, b) => {
                let (a, b) = (self.lower(a, k), self.lower(b, k));
                self.intern(Core::And(a, b))
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.lower(a, k), self.lower(b, k));
                self.intern(Core::And(a.flip(), b.flip())).flip()
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.lower(a, k), self.lower(b, k));
                self.intern(Core::And(a, b.flip())).flip()
            }
            Formula::Next(a) => {
                let a = self.lower(a, k);
                self.intern(Core::Next(a))
            }
            Formula::Finally(a) => {
                let t = self.intern(Core::True);
                let a = self.lower(a, k);
                self.intern(Core::Until(t, a))
            }
            Formula::Globally(a) => {
                let t = self.intern(Core::True);
                let a = self.lower(a, k);
                self.intern(Core::Until(t, a.flip())).flip()
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.lower(a, k), self.lower(b, k));
                self.intern(Core::Until(a, b))
            }
            Formula::Release(a, b) => {
                let (a, b) = (self.lower(a, k), self.lower(b, k));
                self.intern(Core::Until(a.flip(), b.flip())).flip()
            }
        }
    }

    /// All locally consistent assignments for a state labeled `label`.
    fn atoms(&self, label: LabelSet, cap: usize) -> Result<Vec<u128>, CheckError> {
        let mut partial: Vec<u128> = vec![0];
        for (i, node) in self.nodes.iter().enumerate() {
            let bit = 1u128 << i;
            let mut out = Vec::with_capacity(partial.len());
            for &bits in &partial {
                match *node {
                    Core::True => out.push(bits | bit),
                    Core::Ap(a) => out.push(if label.contains(a) { bits | bit } else { bits }),
                    Core::And(a, b) => out.push(if a.eval(bits) && b.eval(bits) {
                        bits | bit
                    } else {
                        bits
                    }),
                    Core::Next(_) => {
                        out.push(bits);
                        out.push(bits | bit);
                    }
                    Core::Until(a, b) => {
                        if b.eval(bits) {
                            out.push(bits | bit);
                        } else if !a.eval(bits) {
                            out.push(bits);
                        } else {
                            out.push(bits);
                            out.push(bits | bit);
                        }
                    }
                }
            }
            if out.len() > cap {
                return Err(CheckError::ResourceLimit {
                    what: "closure atoms",
                    limit: cap,
                });
            }
            partial = out;
        }
        Ok(partial)
    }

    /// Constraint `(mask, value)` every successor atom of `bits` must meet,
    /// or `None` if the obligations contradict each other.
    fn successor_constraint(&self, bits: u128) -> Option<(u128, u128)> {
        let (mut mask, mut value) = (0u128, 0u128);
        let mut require = |r: Ref, v: bool| -> bool {
            let bit = 1u128 << r.idx;
            let want = v ^ r.neg;
            if mask & bit != 0 {
                return (value & bit != 0) == want;
            }
            mask |= bit;
            if want {
                value |= bit;
            }
            true
        };
        for (i, node) in self.nodes.iter().enumerate() {
            let here = (bits >> i) & 1 == 1;
            let ok = match *node {
                Core::Next(a) => require(a, here),
                Core::Until(a, b) if !b.eval(bits) && a.eval(bits) => {
                    require(Ref { idx: i, neg: false }, here)
                }
                _ => true,
            };
            if !ok {
                return None;
            }
        }
        Some((mask, value))
    }
}

struct Graph {
    state_of: Vec<usize>,
    bits: Vec<u128>,
    adj: Vec<Vec<usize>>,
    initial: Vec<usize>,
}

fn build_graph(
    k: &KripkeStructure,
    cl: &Closure,
    root: Ref,
    limits: &CheckLimits,
) -> Result<Graph, CheckError> {
    let cap = limits.max_product_states;
    let mut offset = Vec::with_capacity(k.state_count());
    let mut state_of = Vec::new();
    let mut bits = Vec::new();
    for s in 0..k.state_count() {
        offset.push(bits.len());
        for a in cl.atoms(k.labels[s], cap)? {
            if bits.len() >= cap {
                return Err(CheckError::ResourceLimit {
                    what: "product states",
                    limit: cap,
                });
            }
            state_of.push(s);
            bits.push(a);
        }
    }
    let count = |s: usize| {
        let end = offset.get(s + 1).copied().unwrap_or(bits.len());
        offset[s]..end
    };

    let mut buckets: HashMap<(usize, u128), HashMap<u128, Vec<usize>>> = HashMap::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); bits.len()];
    let mut reached = vec![false; bits.len()];
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &s in &k.initial {
        for id in count(s) {
            if root.eval(bits[id]) && !reached[id] {
                reached[id] = true;
                initial.push(id);
                queue.push_back(id);
            }
        }
    }
    while let Some(id) = queue.pop_front() {
        let Some((mask, value)) = cl.successor_constraint(bits[id]) else {
            continue;
        };
        let mut succ = Vec::new();
        for &s2 in &k.successors[state_of[id]] {
            let bucket = buckets.entry((s2, mask)).or_insert_with(|| {
                let mut m: HashMap<u128, Vec<usize>> = HashMap::new();
                for j in count(s2) {
                    m.entry(bits[j] & mask).or_default().push(j);
                }
                m
            });
            if let Some(targets) = bucket.get(&value) {
                for &t in targets {
                    succ.push(t);
                    if !reached[t] {
                        reached[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        adj[id] = succ;
    }
    Ok(Graph {
        state_of,
        bits,
        adj,
        initial,
    })
}

/// Tarjan's algorithm, iterative; components in completion order.
fn sccs(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for &root in &g.initial {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < g.adj[v].len() {
                let w = g.adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Shortest path (by BFS, successor order) from any of `from` to a node
/// satisfying `goal`, restricted to `allowed` nodes after the first step.
/// Returned path includes the start and the goal.
fn bfs_path(
    g: &Graph,
    from: &[usize],
    goal: impl Fn(usize) -> bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in from {
        if goal(s) {
            return Some(vec![s]);
        }
        if parent.insert(s, usize::MAX).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &g.adj[v] {
            if !allowed(w) || parent.contains_key(&w) {
                continue;
            }
            parent.insert(w, v);
            if goal(w) {
                let mut path = vec![w];
                let mut cur = v;
                while cur != usize::MAX {
                    path.push(cur);
                    cur = parent[&cur];
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

pub fn check_reference_with(
    k: &KripkeStructure,
    f: &Formula,
    limits: &CheckLimits,
) -> Result<Verdict, CheckError> {
    ensure_checkable(k, f)?;
    let mut cl = Closure::default();
    let root = cl.lower(f, k).flip();
    if cl.nodes.len() > MAX_CLOSURE {
        return Err(CheckError::ResourceLimit {
            what: "closure size",
            limit: MAX_CLOSURE,
        });
    }
    let g = build_graph(k, &cl, root, limits)?;
    let untils: Vec<(usize, Ref)> = cl
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            Core::Until(_, b) => Some((i, *b)),
            _ => None,
        })
        .collect();

    for comp in sccs(&g) {
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        let nontrivial = comp.len() > 1 || g.adj[comp[0]].contains(&comp[0]);
        if !nontrivial {
            continue;
        }
        let mut witnesses = Vec::new();
        let mut fulfilled = true;
        for &(u, b) in &untils {
            if !comp.iter().any(|&v| (g.bits[v] >> u) & 1 == 1) {
                continue;
            }
            match comp.iter().find(|&&v| b.eval(g.bits[v])) {
                Some(&w) => witnesses.push(w),
                None => {
                    fulfilled = false;
                    break;
                }
            }
        }
        if !fulfilled {
            continue;
        }
        let inside = |v: usize| members.contains(&v);
        let stem = bfs_path(&g, &g.initial, inside, |_| true).expect("component is reachable");
        let entry = *stem.last().expect("nonempty path");
        let mut cycle = vec![entry];
        let mut cur = entry;
        for w in witnesses {
            if cycle.contains(&w) {
                continue;
            }
            let leg = bfs_path(&g, &[cur], |v| v == w, inside).expect("strongly connected");
            cycle.extend(&leg[1..]);
            cur = w;
        }
        let from: Vec<usize> = g.adj[cur].iter().copied().filter(|&v| inside(v)).collect();
        let back = bfs_path(&g, &from, |v| v == entry, inside).expect("strongly connected");
        // `back` ends at `entry`, which already opens the cycle.
        cycle.extend(&back[..back.len() - 1]);
        let to_k = |ids: &[usize]| ids.iter().map(|&v| g.state_of[v]).collect::<Vec<_>>();
        return Ok(Verdict::Violated(Lasso {
            stem: to_k(&stem[..stem.len() - 1]),
            cycle: to_k(&cycle),
        }));
    }
    Ok(Verdict::Holds)
}
