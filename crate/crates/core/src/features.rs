//! Fixed-width numeric encoding of (structure, formula) pairs.
//!
//! Schema v1, in column order:
//!
//! | #  | name              | meaning                                         |
//! |----|-------------------|-------------------------------------------------|
//! | 0  | `states`          | number of states                                |
//! | 1  | `edges`           | number of transitions                           |
//! | 2  | `edge_density`    | edges / states²                                 |
//! | 3  | `initial`         | number of initial states                        |
//! | 4  | `min_out_degree`  | smallest successor count                        |
//! | 5  | `max_out_degree`  | largest successor count                         |
//! | 6–9| `ap_freq_0..3`    | fraction of states labeled with AP i (0 if none)|
//! | 10 | `self_loops`      | states with an edge to themselves               |
//! | 11 | `length`          | formula AST node count                          |
//! | 12 | `depth`           | formula AST depth (a leaf has depth 1)          |
//! | 13–21 | `n_not` … `n_release` | occurrences of ¬ ∧ ∨ → X F G U R         |
//! | 22 | `atoms`           | atom occurrences                                |
//! | 23 | `temporal_ratio`  | temporal operators / length                     |
//!
//! Mean out-degree is omitted: it always equals `edges / states`.

use std::io;

use thiserror::Error;

use crate::logic::{Formula, KripkeStructure, NodeKind};

pub const SCHEMA_VERSION: u32 = 1;
/// Number of features.
pub const DIM: usize = 24;
/// APs beyond this many are ignored; fewer are padded with zeros.
pub const AP_SLOTS: usize = 4;

/// Column names in schema order.
pub const FEATURE_NAMES: [&str; DIM] = [
    "states",
    "edges",
    "edge_density",
    "initial",
    "min_out_degree",
    "max_out_degree",
    "ap_freq_0",
    "ap_freq_1",
    "ap_freq_2",
    "ap_freq_3",
    "self_loops",
    "length",
    "depth",
    "n_not",
    "n_and",
    "n_or",
    "n_implies",
    "n_next",
    "n_finally",
    "n_globally",
    "n_until",
    "n_release",
    "atoms",
    "temporal_ratio",
];

const OPERATOR_KINDS: [NodeKind; 9] = [
    NodeKind::Not,
    NodeKind::And,
    NodeKind::Or,
    NodeKind::Implies,
    NodeKind::Next,
    NodeKind::Finally,
    NodeKind::Globally,
    NodeKind::Until,
    NodeKind::Release,
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_version: u32,
}

pub fn extract(k: &KripkeStructure, f: &Formula) -> FeatureVector {
    let n = k.state_count();
    let degrees: Vec<usize> = k.successors.iter().map(Vec::len).collect();
    let edges: usize = degrees.iter().sum();
    let mut v = Vec::with_capacity(DIM);
    v.push(n as f64);
    v.push(edges as f64);
    v.push(if n == 0 { 0.0 } else { edges as f64 / (n * n) as f64 });
    v.push(k.initial.len() as f64);
    v.push(degrees.iter().copied().min().unwrap_or(0) as f64);
    v.push(degrees.iter().copied().max().unwrap_or(0) as f64);
    for i in 0..AP_SLOTS {
        let labeled = if i < k.alphabet.len() {
            k.labels.iter().filter(|l| l.contains(i)).count()
        } else {
            0
        };
        v.push(if n == 0 { 0.0 } else { labeled as f64 / n as f64 });
    }
    let loops = (0..n).filter(|&s| k.successors[s].contains(&s)).count();
    v.push(loops as f64);

    let len = f.length();
    v.push(len as f64);
    v.push(f.depth() as f64);
    for kind in OPERATOR_KINDS {
        v.push(f.count_kind(kind) as f64);
    }
    v.push(f.count_kind(NodeKind::Atom) as f64);
    v.push(f.temporal_count() as f64 / len as f64);
    debug_assert_eq!(v.len(), DIM);
    FeatureVector {
        values: v,
        schema_version: SCHEMA_VERSION,
    }
}

/// Per-feature standardization parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Population standard deviations, zeros replaced by 1.
    pub std: Vec<f64>,
}

/// Panics if `vectors` is empty or ragged.
pub fn fit_scaler(vectors: &[Vec<f64>]) -> Scaler {
    assert!(!vectors.is_empty(), "fit_scaler needs at least one vector");
    let d = vectors[0].len();
    assert!(vectors.iter().all(|v| v.len() == d), "ragged feature rows");
    let m = vectors.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / m)
        .collect();
    let std = (0..d)
        .map(|j| {
            let var = vectors.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / m;
            let s = var.sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    Scaler { mean, std }
}

pub fn apply_scaler(s: &Scaler, v: &[f64]) -> Vec<f64> {
    v.iter()
        .zip(s.mean.iter().zip(&s.std))
        .map(|(x, (m, sd))| (x - m) / sd)
        .collect()
}

#[derive(Debug, Error)]
pub enum FeatureCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("feature CSV header does not match schema v{SCHEMA_VERSION}")]
    Header,
    #[error("feature CSV row {row}: {message}")]
    Row { row: usize, message: String },
}

/// Feature matrix with binary labels (1 = holds).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatures {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

pub fn write_feature_csv<W: io::Write>(
    out: W,
    data: &LabeledFeatures,
) -> Result<(), FeatureCsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FEATURE_NAMES.iter().copied().chain(["label"]))?;
    for (row, label) in data.rows.iter().zip(&data.labels) {
        let fields = row
            .iter()
            .map(|x| x.to_string())
            .chain([label.to_string()]);
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_csv<R: io::Read>(input: R) -> Result<LabeledFeatures, FeatureCsvError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if !header
        .iter()
        .eq(FEATURE_NAMES.iter().copied().chain(["label"]))
    {
        return Err(FeatureCsvError::Header);
    }
    let mut data = LabeledFeatures {
        rows: Vec::new(),
        labels: Vec::new(),
    };
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |message: String| FeatureCsvError::Row { row, message };
        let mut vals = Vec::with_capacity(DIM);
        for field in rec.iter().take(DIM) {
            let x: f64 = field
                .parse()
                .map_err(|_| bad(format!("`{field}` is not a number")))?;
            if !x.is_finite() {
                return Err(bad(format!("`{field}` is not finite")));
            }
            vals.push(x);
        }
        let label = match &rec[DIM] {
            "0" => 0,
            "1" => 1,
            other => return Err(bad(format!("label `{other}` is not 0 or 1"))),
        };
        data.rows.push(vals);
        data.labels.push(label);
    }
    Ok(data)
}
