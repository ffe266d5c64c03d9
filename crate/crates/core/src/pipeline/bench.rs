use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::learners::Algorithm;

/// Checking time versus prediction time for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub algorithm: Algorithm,
    pub formula_length_class: Option<usize>,
    /// Mean wall time to model-check one instance (t₁).
    pub t1_mean_seconds: f64,
    /// Mean wall time to predict one instance (t₂).
    pub t2_mean_seconds: f64,
    /// t₂ / t₁ as a plain fraction.
    pub ratio_t2_over_t1: f64,
    /// t₁ / t₂ rounded to the nearest integer.
    pub ratio_t1_over_t2: u64,
}

pub fn bench_report(
    algorithm: Algorithm,
    formula_length_class: Option<usize>,
    t1: f64,
    t2: f64,
) -> Result<BenchReport, PipelineError> {
    if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(PipelineError::MissingTiming(format!(
            "timings must be positive (t1 = {t1}, t2 = {t2})"
        )));
    }
    Ok(BenchReport {
        algorithm,
        formula_length_class,
        t1_mean_seconds: t1,
        t2_mean_seconds: t2,
        ratio_t2_over_t1: t2 / t1,
        ratio_t1_over_t2: (t1 / t2).round() as u64,
    })
}

/// A fraction as a percentage with two significant digits, e.g. `0.21%`.
pub fn percent(x: f64) -> String {
    let p = x * 100.0;
    if p == 0.0 || !p.is_finite() {
        return format!("{p}%");
    }
    let digits = (1 - p.abs().log10().floor() as i32).max(0) as usize;
    format!("{p:.digits$}%")
}
