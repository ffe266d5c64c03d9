//! Seeded generation of formulas and Kripke structures.
//!
//! Both generators are pure functions of their [`GenSpec`]. The Kripke
//! generator draws from sub-stream 1 of the seed and the formula generator
//! from sub-stream 2 (see [`crate::rng`]).
//!
//! Kripke procedure, in draw order: state count uniform in `stateRange`;
//! for each ordered pair `(i, j)` (row-major) an edge with probability
//! `edgeDensity`; for each state without successors, one uniformly chosen
//! successor; for each state and proposition a fair coin; for each state
//! a coin with probability [`INITIAL_PROBABILITY`] for membership in the
//! initial set, falling back to one uniformly chosen state if none was
//! picked.
//!
//! Formula procedure for a node budget `n`: among kinds with positive
//! weight whose subtree can be completed to exactly `n` nodes (leaves need
//! `n = 1`, unary kinds a feasible `n - 1`, binary kinds a feasible split of
//! `n - 1`), pick one proportionally to weight; atoms are uniform over the
//! alphabet; binary budgets are split by drawing the left size uniformly
//! among feasible splits.

use std::collections::BTreeMap;

use thiserror::Error;

use super::formula::{Formula, NodeKind};
use super::kripke::{KripkeStructure, LabelSet, MAX_ALPHABET};
use crate::rng::SplitMix64;

pub const KRIPKE_STREAM: u64 = 1;
pub const FORMULA_STREAM: u64 = 2;
pub const INITIAL_PROBABILITY: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
    #[error("no formula of length {0} can be built from the positive-weight kinds")]
    ImpossibleLength(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWeights(pub BTreeMap<NodeKind, f64>);

impl Default for OperatorWeights {
    fn default() -> Self {
        let mut m = BTreeMap::new();
        for k in NodeKind::ALL {
            let w = match k {
                NodeKind::Atom => 4.0,
                NodeKind::True | NodeKind::False => 0.25,
                _ => 1.0,
            };
            m.insert(k, w);
        }
        OperatorWeights(m)
    }
}

impl OperatorWeights {
    pub fn get(&self, k: NodeKind) -> f64 {
        self.0.get(&k).copied().unwrap_or(0.0)
    }

    /// `kind:weight` pairs separated by commas, e.g. `atom:4,until:1`.
    pub fn parse(s: &str) -> Result<Self, GenError> {
        let mut m = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, w) = part
                .split_once(':')
                .ok_or_else(|| GenError::InvalidSpec(format!("weight `{part}` is not kind:value")))?;
            let kind = NodeKind::from_name(k.trim())
                .ok_or_else(|| GenError::InvalidSpec(format!("unknown node kind `{k}`")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| GenError::InvalidSpec(format!("bad weight `{w}`")))?;
            m.insert(kind, w);
        }
        Ok(OperatorWeights(m))
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|(k, w)| format!("{}:{}", k.name(), w))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub state_range: (usize, usize),
    pub ap_count: usize,
    pub edge_density: f64,
    pub formula_length: usize,
    pub operator_weights: OperatorWeights,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            seed: 0,
            state_range: (2, 6),
            ap_count: 2,
            edge_density: 0.4,
            formula_length: 15,
            operator_weights: OperatorWeights::default(),
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidSpec(m.to_string()));
        let (lo, hi) = self.state_range;
        if lo < 1 || hi < lo {
            return bad("state range must satisfy 1 <= min <= max");
        }
        if self.ap_count < 1 || self.ap_count > MAX_ALPHABET {
            return bad("proposition count must be in 1..=64");
        }
        if !(self.edge_density > 0.0 && self.edge_density <= 1.0) {
            return bad("edge density must be in (0, 1]");
        }
        if self.formula_length < 1 {
            return bad("formula length must be at least 1");
        }
        let ws = &self.operator_weights.0;
        if ws.values().any(|w| !w.is_finite() || *w < 0.0) {
            return bad("operator weights must be finite and nonnegative");
        }
        if !ws.values().any(|w| *w > 0.0) {
            return bad("at least one operator weight must be positive");
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Vec<String> {
        default_alphabet(self.ap_count)
    }
}

/// `p, q, r, s, t, u, v, w`, then `p8, p9, ...`.
pub fn default_alphabet(n: usize) -> Vec<String> {
    const NAMES: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "w"];
    (0..n)
        .map(|i| match NAMES.get(i) {
            Some(s) => s.to_string(),
            None => format!("p{i}"),
        })
        .collect()
}

pub fn random_kripke(spec: &GenSpec) -> Result<KripkeStructure, GenError> {
    spec.validate()?;
    let mut rng = SplitMix64::stream(spec.seed, KRIPKE_STREAM);
    let (lo, hi) = spec.state_range;
    let n = lo + rng.below(hi - lo + 1);
    let mut successors = vec![Vec::new(); n];
    for succ in successors.iter_mut() {
        for j in 0..n {
            if rng.bernoulli(spec.edge_density) {
                succ.push(j);
            }
        }
    }
    for succ in successors.iter_mut() {
        if succ.is_empty() {
            succ.push(rng.below(n));
        }
    }
    let mut labels = vec![LabelSet::EMPTY; n];
    for l in labels.iter_mut() {
        for a in 0..spec.ap_count {
            if rng.bernoulli(0.5) {
                l.insert(a);
            }
        }
    }
    let mut initial: Vec<usize> = (0..n)
        .filter(|_| rng.bernoulli(INITIAL_PROBABILITY))
        .collect();
    if initial.is_empty() {
        initial.push(rng.below(n));
    }
    Ok(KripkeStructure {
        alphabet: spec.alphabet(),
        initial,
        successors,
        labels,
    })
}

struct FormulaGen<'a> {
    rng: SplitMix64,
    alphabet: &'a [String],
    weights: Vec<(NodeKind, f64)>,
    feasible: Vec<bool>,
    // Feasible left-subtree sizes for a binary node of each budget.
    splits: Vec<Vec<usize>>,
}

impl FormulaGen<'_> {
    fn fits(&self, kind: NodeKind, budget: usize) -> bool {
        match kind.arity() {
            0 => budget == 1,
            1 => budget >= 2 && self.feasible[budget - 1],
            _ => !self.splits[budget].is_empty(),
        }
    }

    fn build(&mut self, budget: usize) -> Formula {
        let options: Vec<(NodeKind, f64)> = self
            .weights
            .iter()
            .copied()
            .filter(|&(k, _)| self.fits(k, budget))
            .collect();
        let ws: Vec<f64> = options.iter().map(|(_, w)| *w).collect();
        let kind = options[self.rng.weighted_index(&ws)].0;
        match kind {
            NodeKind::Atom => {
                let i = self.rng.below(self.alphabet.len());
                Formula::Atom(self.alphabet[i].clone())
            }
            NodeKind::True => Formula::True,
            NodeKind::False => Formula::False,
            NodeKind::Not => Formula::not(self.build(budget - 1)),
            NodeKind::Next => Formula::next(self.build(budget - 1)),
            NodeKind::Finally => Formula::finally(self.build(budget - 1)),
            NodeKind::Globally => Formula::globally(self.build(budget - 1)),
            binary => {
                let n = self.splits[budget].len();
                let left = self.splits[budget][self.rng.below(n)];
                let a = self.build(left);
                let b = self.build(budget - 1 - left);
                match binary {
                    NodeKind::And => Formula::and(a, b),
                    NodeKind::Or => Formula::or(a, b),
                    NodeKind::Implies => Formula::implies(a, b),
                    NodeKind::Until => Formula::until(a, b),
                    NodeKind::Release => Formula::release(a, b),
                    _ => unreachable!("arity-2 kinds only"),
                }
            }
        }
    }
}

/// Random formula with exactly `spec.formula_length` nodes over `alphabet`.
pub fn random_formula(spec: &GenSpec, alphabet: &[String]) -> Result<Formula, GenError> {
    spec.validate()?;
    let weights: Vec<(NodeKind, f64)> = NodeKind::ALL
        .iter()
        .map(|&k| (k, spec.operator_weights.get(k)))
        .filter(|&(k, w)| w > 0.0 && !(k == NodeKind::Atom && alphabet.is_empty()))
        .collect();
    let len = spec.formula_length;
    let has = |arity: usize| weights.iter().any(|(k, _)| k.arity() == arity);
    let mut feasible = vec![false; len + 1];
    let mut splits = vec![Vec::new(); len + 1];
    for n in 1..=len {
        if n >= 3 && has(2) {
            splits[n] = (1..=n - 2)
                .filter(|&l| feasible[l] && feasible[n - 1 - l])
                .collect();
        }
        feasible[n] = match n {
            1 => has(0),
            _ => (has(1) && feasible[n - 1]) || !splits[n].is_empty(),
        };
    }
    if !feasible[len] {
        return Err(GenError::ImpossibleLength(len));
    }
    let mut g = FormulaGen {
        rng: SplitMix64::stream(spec.seed, FORMULA_STREAM),
        alphabet,
        weights,
        feasible,
        splits,
    };
    Ok(g.build(len))
}
