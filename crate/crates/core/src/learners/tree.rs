//! CART decision trees (Gini) and bagged random forests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_xy, LearnError};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for DtParams {
    fn default() -> Self {
        DtParams {
            max_depth: 10,
            min_samples_split: 2,
        }
    }
}

/// A node routes `x` left when `x[feature] <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: u8,
        /// Fraction of positive training rows that reached this leaf.
        prob: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtModel {
    pub root: Node,
}

impl DtModel {
    fn leaf(&self, x: &[f64]) -> (u8, f64) {
        let mut n = &self.root;
        loop {
            match n {
                Node::Leaf { class, prob } => return (*class, *prob),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => n = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        self.leaf(x).0
    }

    /// Positive fraction of the leaf `x` falls into.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.leaf(x).1
    }

    pub fn depth(&self) -> usize {
        fn go(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(left).max(go(right)),
            }
        }
        go(&self.root)
    }
}

/// Greedy CART. Among all (feature, threshold) pairs the split with the
/// largest Gini decrease wins; ties go to the lower feature index, then the
/// lower threshold. Thresholds lie between consecutive distinct values. A
/// node becomes a leaf when it is pure, at `max_depth`, smaller than
/// `min_samples_split`, or has no candidate threshold. Leaves predict the
/// majority class (ties → 1).
pub fn train_dt(x: &[Vec<f64>], y: &[u8], params: &DtParams) -> Result<DtModel, LearnError> {
    check_xy(x, y)?;
    let rows: Vec<usize> = (0..x.len()).collect();
    let mut b = Builder {
        x,
        y,
        params: *params,
        features: Features::All,
    };
    Ok(DtModel {
        root: b.grow(rows, 0),
    })
}

enum Features {
    All,
    Sampled { per_split: usize, rng: SplitMix64 },
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u8],
    params: DtParams,
    features: Features,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    // Split quality Σ_children (pos² + neg²) / size as num / den.
    num: u128,
    den: u128,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.num * other.den > other.num * self.den
    }
}

fn purity(pos: u128, neg: u128) -> u128 {
    pos * pos + neg * neg
}

impl Builder<'_> {
    fn leaf(&self, rows: &[usize]) -> Node {
        let pos = rows.iter().filter(|&&r| self.y[r] == 1).count();
        Node::Leaf {
            class: u8::from(2 * pos >= rows.len()),
            prob: pos as f64 / rows.len() as f64,
        }
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x[0].len();
        match &mut self.features {
            Features::All => (0..d).collect(),
            Features::Sampled { per_split, rng } => {
                let mut f = rng.sample_indices(d, *per_split);
                f.sort_unstable();
                f
            }
        }
    }

    fn best_split(&self, rows: &[usize], features: &[usize]) -> Option<Candidate> {
        let total_pos = rows.iter().filter(|&&r| self.y[r] == 1).count() as u128;
        let total = rows.len() as u128;
        let mut best: Option<Candidate> = None;
        let mut sorted = rows.to_vec();
        for &f in features {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left_pos = 0u128;
            for i in 0..sorted.len() - 1 {
                left_pos += u128::from(self.y[sorted[i]]);
                let (lo, hi) = (self.x[sorted[i]][f], self.x[sorted[i + 1]][f]);
                if lo == hi {
                    continue;
                }
                let nl = i as u128 + 1;
                let nr = total - nl;
                let right_pos = total_pos - left_pos;
                let c = Candidate {
                    feature: f,
                    threshold: midpoint(lo, hi),
                    num: purity(left_pos, nl - left_pos) * nr
                        + purity(right_pos, nr - right_pos) * nl,
                    den: nl * nr,
                };
                if best.as_ref().is_none_or(|b| c.beats(b)) {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> Node {
        let pos = rows.iter().filter(|&&r| self.y[r] == 1).count();
        if pos == 0
            || pos == rows.len()
            || depth >= self.params.max_depth
            || rows.len() < self.params.min_samples_split.max(2)
        {
            return self.leaf(&rows);
        }
        let features = self.candidate_features();
        let Some(best) = self.best_split(&rows, &features) else {
            return self.leaf(&rows);
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x[i][best.feature] <= best.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// A value in `[lo, hi)`, as close to the midpoint as rounding allows.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m < hi && m.is_finite() {
        m
    } else {
        lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    pub seed: u64,
    /// Bootstrap resampling per tree. Disabling it is a test hook.
    pub bootstrap: bool,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            n_trees: 100,
            max_depth: 10,
            min_samples_split: 2,
            features_per_split: None,
            seed: 0,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfModel {
    pub trees: Vec<DtModel>,
    pub tree_seeds: Vec<u64>,
}

impl RfModel {
    fn positive_votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict(x) == 1).count()
    }

    /// Majority vote; a tied vote predicts 1.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(2 * self.positive_votes(x) >= self.trees.len())
    }

    /// Fraction of trees voting 1.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.positive_votes(x) as f64 / self.trees.len() as f64
    }
}

fn isqrt_ceil(d: usize) -> usize {
    (1..=d).find(|m| m * m >= d).unwrap_or(1)
}

/// Bagged CART forest. Tree `t` draws from `SplitMix64::new(seed + t)`:
/// first its bootstrap sample (`n` indices with replacement), then one
/// feature subset per split in depth-first, left-first order. Trees are
/// trained in parallel; the result does not depend on scheduling.
pub fn train_rf(x: &[Vec<f64>], y: &[u8], params: &RfParams) -> Result<RfModel, LearnError> {
    check_xy(x, y)?;
    if params.n_trees == 0 {
        return Err(LearnError::InvalidParam("n_trees must be at least 1".into()));
    }
    let d = x[0].len();
    let per_split = params
        .features_per_split
        .unwrap_or_else(|| isqrt_ceil(d))
        .clamp(1, d.max(1));
    let tree_seeds: Vec<u64> = (0..params.n_trees as u64)
        .map(|t| params.seed.wrapping_add(t))
        .collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = SplitMix64::new(s);
            let rows: Vec<usize> = if params.bootstrap {
                (0..x.len()).map(|_| rng.below(x.len())).collect()
            } else {
                (0..x.len()).collect()
            };
            let mut b = Builder {
                x,
                y,
                params: DtParams {
                    max_depth: params.max_depth,
                    min_samples_split: params.min_samples_split,
                },
                features: Features::Sampled { per_split, rng },
            };
            DtModel {
                root: b.grow(rows, 0),
            }
        })
        .collect();
    Ok(RfModel { trees, tree_seeds })
}
