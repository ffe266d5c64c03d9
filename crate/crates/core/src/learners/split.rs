use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::rng::SplitMix64;

/// RNG stream used by the train/test split.
pub const SPLIT_STREAM: u64 = 3;

/// Per-record Bernoulli train/test assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Probability that a record lands in the training part.
    pub fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.fraction > 0.0 && self.fraction < 1.0 {
            Ok(())
        } else {
            Err(LearnError::InvalidFraction(self.fraction))
        }
    }
}

/// Indices of the training and test parts of a dataset of size `n`.
///
/// Record `i` goes to training when the `i`-th draw of
/// `stream(seed, SPLIT_STREAM)` succeeds with probability `fraction`. If
/// either part comes out empty the whole draw is repeated with `seed + 1`,
/// `seed + 2`, … .
pub fn split(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), LearnError> {
    spec.validate()?;
    if n < 2 {
        return Err(LearnError::TooFewRecords { needed: 2, got: n });
    }
    let mut seed = spec.seed;
    loop {
        let mut rng = SplitMix64::stream(seed, SPLIT_STREAM);
        let (train, test): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|_| rng.bernoulli(spec.fraction));
        if !train.is_empty() && !test.is_empty() {
            return Ok((train, test));
        }
        seed = seed.wrapping_add(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_exhaustive() {
        let spec = SplitSpec {
            fraction: 0.88,
            seed: 1243,
        };
        let (a, b) = split(405, &spec).unwrap();
        assert_eq!((a.clone(), b.clone()), split(405, &spec).unwrap());
        assert_eq!(a.len() + b.len(), 405);
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..405).collect::<Vec<_>>());
    }

    #[test]
    fn extreme_fraction_keeps_both_parts() {
        for seed in 0..50 {
            let (a, b) = split(2, &SplitSpec { fraction: 0.999, seed }).unwrap();
            assert_eq!((a.len(), b.len()), (1, 1));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let ok = SplitSpec { fraction: 0.5, seed: 0 };
        assert!(split(1, &ok).is_err());
        assert!(split(10, &SplitSpec { fraction: 1.0, seed: 0 }).is_err());
        assert!(split(10, &SplitSpec { fraction: 0.0, seed: 0 }).is_err());
    }
}
