//! Verdict classifiers, metrics and the train/test split.
//!
//! Every learner is a pure function of its inputs and parameters. Scores
//! are oriented so that higher means "more likely Holds" (label 1).

mod knn;
mod logistic;
mod metrics;
mod split;
mod tree;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{apply_scaler, fit_scaler, Scaler, SCHEMA_VERSION};

pub use knn::{train_knn, KnnModel};
pub use logistic::{loss_and_gradient, train_lr, train_lr_traced, LrModel, LrParams};
pub use metrics::{accuracy, auc};
pub use split::{split, SplitSpec, SPLIT_STREAM};
pub use tree::{train_dt, train_rf, DtModel, DtParams, Node, RfModel, RfParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("no training rows")]
    Empty,
    #[error("{rows} feature rows but {labels} labels")]
    DimensionMismatch { rows: usize, labels: usize },
    #[error("feature rows have differing widths")]
    RaggedRows,
    #[error("label {0} is not 0 or 1")]
    BadLabel(u8),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("AUC needs both classes present")]
    SingleClass,
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("split fraction {0} is not strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("schema mismatch: model expects {expected}, data has {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("model file: {0}")]
    ModelFormat(String),
}

pub(crate) fn check_xy(x: &[Vec<f64>], y: &[u8]) -> Result<(), LearnError> {
    if x.len() != y.len() {
        return Err(LearnError::DimensionMismatch {
            rows: x.len(),
            labels: y.len(),
        });
    }
    if x.is_empty() {
        return Err(LearnError::Empty);
    }
    if x.iter().any(|r| r.len() != x[0].len()) {
        return Err(LearnError::RaggedRows);
    }
    if let Some(&b) = y.iter().find(|&&l| l > 1) {
        return Err(LearnError::BadLabel(b));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rf,
    Knn,
    Dt,
    Lr,
}

impl Algorithm {
    /// Report column order.
    pub const ALL: [Algorithm; 4] = [Algorithm::Rf, Algorithm::Knn, Algorithm::Dt, Algorithm::Lr];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rf => "rf",
            Algorithm::Knn => "knn",
            Algorithm::Dt => "dt",
            Algorithm::Lr => "lr",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected rf, knn, dt or lr)"))
    }
}

/// Hyperparameters for all four learners; each uses its own part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub dt: DtParams,
    pub rf: RfParams,
    pub knn_k: usize,
    pub lr: LrParams,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            dt: DtParams::default(),
            rf: RfParams::default(),
            knn_k: 5,
            lr: LrParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum ModelBody {
    Rf { params: RfParams, model: RfModel },
    Knn { model: KnnModel },
    Dt { params: DtParams, model: DtModel },
    Lr { params: LrParams, model: LrModel },
}

const MODEL_FORMAT: &str = "ltloracle-model";
const MODEL_VERSION: u32 = 1;

/// A fitted scaler plus one learner; inputs are raw feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format: String,
    pub version: u32,
    pub schema_version: u32,
    pub scaler: Scaler,
    #[serde(flatten)]
    pub body: ModelBody,
}

impl TrainedModel {
    pub fn algorithm(&self) -> Algorithm {
        match self.body {
            ModelBody::Rf { .. } => Algorithm::Rf,
            ModelBody::Knn { .. } => Algorithm::Knn,
            ModelBody::Dt { .. } => Algorithm::Dt,
            ModelBody::Lr { .. } => Algorithm::Lr,
        }
    }

    pub fn dim(&self) -> usize {
        self.scaler.mean.len()
    }

    /// Label and score for one raw feature row.
    pub fn predict_one(&self, raw: &[f64]) -> (u8, f64) {
        let x = apply_scaler(&self.scaler, raw);
        match &self.body {
            ModelBody::Rf { model, .. } => (model.predict(&x), model.score(&x)),
            ModelBody::Knn { model } => (model.predict(&x), model.score(&x)),
            ModelBody::Dt { model, .. } => (model.predict(&x), model.score(&x)),
            ModelBody::Lr { model, .. } => (model.predict(&x), model.score(&x)),
        }
    }

    /// Pretty JSON; floats are written in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LearnError> {
        let m: TrainedModel =
            serde_json::from_str(text).map_err(|e| LearnError::ModelFormat(e.to_string()))?;
        if m.format != MODEL_FORMAT || m.version != MODEL_VERSION {
            return Err(LearnError::ModelFormat(format!(
                "unsupported format {} v{}",
                m.format, m.version
            )));
        }
        Ok(m)
    }
}

/// Fits a scaler on `x`, then trains `algorithm` on the standardized rows.
pub fn train(
    algorithm: Algorithm,
    x: &[Vec<f64>],
    y: &[u8],
    params: &Params,
) -> Result<TrainedModel, LearnError> {
    check_xy(x, y)?;
    let scaler = fit_scaler(x);
    let xs: Vec<Vec<f64>> = x.iter().map(|r| apply_scaler(&scaler, r)).collect();
    let body = match algorithm {
        Algorithm::Rf => ModelBody::Rf {
            params: params.rf,
            model: train_rf(&xs, y, &params.rf)?,
        },
        Algorithm::Knn => ModelBody::Knn {
            model: train_knn(&xs, y, params.knn_k)?,
        },
        Algorithm::Dt => ModelBody::Dt {
            params: params.dt,
            model: train_dt(&xs, y, &params.dt)?,
        },
        Algorithm::Lr => ModelBody::Lr {
            params: params.lr,
            model: train_lr(&xs, y, &params.lr)?,
        },
    };
    Ok(TrainedModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        schema_version: SCHEMA_VERSION,
        scaler,
        body,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub algorithm: Algorithm,
    pub split: SplitSpec,
    pub train_count: usize,
    pub test_count: usize,
    pub accuracy: f64,
    /// Absent when the test part holds a single class.
    pub auc: Option<f64>,
    /// Mean wall time per test record (t₂). Kept out of reproducible
    /// artifacts; `None` when not loaded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_record_predict_seconds: Option<f64>,
}

/// Scores `model` on a raw test set, timing the predictions.
pub fn evaluate(
    model: &TrainedModel,
    test_x: &[Vec<f64>],
    test_y: &[u8],
    train_count: usize,
    split: SplitSpec,
) -> Result<EvalReport, LearnError> {
    check_xy(test_x, test_y)?;
    if model.schema_version != SCHEMA_VERSION || test_x[0].len() != model.dim() {
        return Err(LearnError::SchemaMismatch {
            expected: format!("v{} with {} features", model.schema_version, model.dim()),
            found: format!("v{SCHEMA_VERSION} with {} features", test_x[0].len()),
        });
    }
    let start = Instant::now();
    let out: Vec<(u8, f64)> = test_x.iter().map(|r| model.predict_one(r)).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let labels: Vec<u8> = out.iter().map(|p| p.0).collect();
    let scores: Vec<f64> = out.iter().map(|p| p.1).collect();
    Ok(EvalReport {
        algorithm: model.algorithm(),
        split,
        train_count,
        test_count: test_x.len(),
        accuracy: accuracy(&labels, test_y)?,
        auc: auc(&scores, test_y).ok(),
        per_record_predict_seconds: Some(elapsed / test_x.len() as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x = (0..20)
            .map(|i| {
                let c = if i < 10 { -3.0 } else { 3.0 };
                vec![c + (i % 5) as f64 * 0.1, c - (i % 3) as f64 * 0.1]
            })
            .collect();
        let y = (0..20).map(|i| u8::from(i >= 10)).collect();
        (x, y)
    }

    #[test]
    fn model_text_round_trip() {
        let (x, y) = blobs();
        let p = Params {
            rf: RfParams {
                n_trees: 5,
                ..RfParams::default()
            },
            ..Params::default()
        };
        for a in Algorithm::ALL {
            let m = train(a, &x, &y, &p).unwrap();
            let text = m.to_text();
            assert!(text.contains(&format!("\"algorithm\": \"{a}\"")));
            assert_eq!(TrainedModel::from_text(&text).unwrap(), m);
        }
        assert!(TrainedModel::from_text("{}").is_err());
    }

    #[test]
    fn self_evaluation_of_one_nn() {
        let (x, y) = blobs();
        let p = Params {
            knn_k: 1,
            ..Params::default()
        };
        let m = train(Algorithm::Knn, &x, &y, &p).unwrap();
        let split = SplitSpec {
            fraction: 0.5,
            seed: 0,
        };
        let r = evaluate(&m, &x, &y, 20, split).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.auc, Some(1.0));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<EvalReport>(&json).unwrap(), r);
    }

    #[test]
    fn schema_mismatch() {
        let (x, y) = blobs();
        let m = train(Algorithm::Dt, &x, &y, &Params::default()).unwrap();
        let r = evaluate(&m, &[vec![0.0; 3]], &[1], 20, SplitSpec { fraction: 0.5, seed: 0 });
        assert!(matches!(r, Err(LearnError::SchemaMismatch { .. })));
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("svm".parse::<Algorithm>().is_err());
    }
}
