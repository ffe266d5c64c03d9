use serde::{Deserialize, Serialize};

use super::{check_xy, LearnError};

/// Stored training matrix (already standardized by the caller).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<u8>,
    pub k: usize,
}

pub fn train_knn(x: &[Vec<f64>], y: &[u8], k: usize) -> Result<KnnModel, LearnError> {
    check_xy(x, y)?;
    if k == 0 || k > x.len() {
        return Err(LearnError::KOutOfRange { k, n: x.len() });
    }
    Ok(KnnModel {
        x: x.to_vec(),
        y: y.to_vec(),
        k,
    })
}

impl KnnModel {
    /// Number of positive labels among the `k` nearest rows by Euclidean
    /// distance; equal distances prefer the lower row index.
    fn positive_neighbors(&self, q: &[f64]) -> usize {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let s: f64 = r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (s, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, cmp);
        }
        d[..self.k].iter().filter(|(_, i)| self.y[*i] == 1).count()
    }

    /// Majority label of the neighbors; a tied vote predicts 1.
    pub fn predict(&self, q: &[f64]) -> u8 {
        u8::from(2 * self.positive_neighbors(q) >= self.k)
    }

    pub fn score(&self, q: &[f64]) -> f64 {
        self.positive_neighbors(q) as f64 / self.k as f64
    }
}
