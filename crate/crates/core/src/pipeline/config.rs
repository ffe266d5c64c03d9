//! Flat `key = value` configuration shared by every command.

use std::path::PathBuf;
use std::str::FromStr;

use super::PipelineError;
use crate::checker::CheckLimits;
use crate::learners::{Algorithm, DtParams, LrParams, Params, RfParams, SplitSpec};
use crate::logic::{GenSpec, OperatorWeights};

/// Which checker labels an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelerChoice {
    Builtin,
    External,
    /// Built-in up to `builtin_max_length`, external above it when a binary
    /// is available.
    Auto,
}

impl LabelerChoice {
    fn name(self) -> &'static str {
        match self {
            LabelerChoice::Builtin => "builtin",
            LabelerChoice::External => "external",
            LabelerChoice::Auto => "auto",
        }
    }
}

impl FromStr for LabelerChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "builtin" => Ok(LabelerChoice::Builtin),
            "external" => Ok(LabelerChoice::External),
            "auto" => Ok(LabelerChoice::Auto),
            _ => Err(format!("unknown labeler `{s}` (expected builtin, external or auto)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub count: usize,
    pub states_min: usize,
    pub states_max: usize,
    pub ap_count: usize,
    pub edge_density: f64,
    pub formula_length: usize,
    pub operator_weights: OperatorWeights,

    pub labeler: LabelerChoice,
    pub nusmv: Option<PathBuf>,
    pub timeout_seconds: f64,
    pub keep_temps: bool,
    pub workers: usize,
    pub builtin_max_length: usize,
    pub max_automaton_states: usize,
    pub max_product_states: usize,

    pub algorithm: Algorithm,
    pub fraction: f64,
    pub split_seed: u64,
    pub sweep_fractions: Vec<f64>,
    pub sweep_seeds: Vec<u64>,

    pub rf_trees: usize,
    pub rf_features: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub knn_k: usize,
    pub lr_rate: f64,
    pub lr_epochs: usize,
    pub lr_l2: f64,

    pub balance_threshold: f64,
    pub balance_regenerate: bool,
    pub balance_retries: usize,
}

impl Default for Config {
    fn default() -> Self {
        let g = GenSpec::default();
        let rf = RfParams::default();
        let lr = LrParams::default();
        let limits = CheckLimits::default();
        Config {
            seed: 1,
            count: 405,
            states_min: g.state_range.0,
            states_max: g.state_range.1,
            ap_count: g.ap_count,
            edge_density: g.edge_density,
            formula_length: 25,
            operator_weights: g.operator_weights,
            labeler: LabelerChoice::Builtin,
            nusmv: None,
            timeout_seconds: 600.0,
            keep_temps: false,
            workers: 0,
            builtin_max_length: 50,
            max_automaton_states: limits.max_automaton_states,
            max_product_states: limits.max_product_states,
            algorithm: Algorithm::Rf,
            fraction: 0.88,
            split_seed: 1,
            sweep_fractions: vec![0.86, 0.88, 0.9],
            sweep_seeds: (1..=10).collect(),
            rf_trees: rf.n_trees,
            rf_features: 0,
            max_depth: rf.max_depth,
            min_samples_split: rf.min_samples_split,
            knn_k: 5,
            lr_rate: lr.lr,
            lr_epochs: lr.epochs,
            lr_l2: lr.l2,
            balance_threshold: 0.9,
            balance_regenerate: true,
            balance_retries: 3,
        }
    }
}

/// Every key, in `--show-config` order.
pub const KEYS: &[&str] = &[
    "seed",
    "count",
    "states_min",
    "states_max",
    "ap_count",
    "edge_density",
    "formula_length",
    "operator_weights",
    "labeler",
    "nusmv",
    "timeout_seconds",
    "keep_temps",
    "workers",
    "builtin_max_length",
    "max_automaton_states",
    "max_product_states",
    "algorithm",
    "fraction",
    "split_seed",
    "sweep_fractions",
    "sweep_seeds",
    "rf_trees",
    "rf_features",
    "max_depth",
    "min_samples_split",
    "knn_k",
    "lr_rate",
    "lr_epochs",
    "lr_l2",
    "balance_threshold",
    "balance_regenerate",
    "balance_retries",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse()
        .map_err(|_| format!("`{key}` expects a number, got `{v}`"))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, String> {
    v.split(',')
        .map(|t| num(key, t.trim()))
        .collect::<Result<Vec<T>, String>>()
}

fn boolean(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{key}` expects true or false, got `{v}`")),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl Config {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let v = value.trim();
        let r: Result<(), String> = (|| {
            match key {
                "seed" => self.seed = num(key, v)?,
                "count" => self.count = num(key, v)?,
                "states_min" => self.states_min = num(key, v)?,
                "states_max" => self.states_max = num(key, v)?,
                "ap_count" => self.ap_count = num(key, v)?,
                "edge_density" => self.edge_density = num(key, v)?,
                "formula_length" => self.formula_length = num(key, v)?,
                "operator_weights" => {
                    self.operator_weights = OperatorWeights::parse(v).map_err(|e| e.to_string())?
                }
                "labeler" => self.labeler = v.parse()?,
                "nusmv" => self.nusmv = (!v.is_empty()).then(|| PathBuf::from(v)),
                "timeout_seconds" => self.timeout_seconds = num(key, v)?,
                "keep_temps" => self.keep_temps = boolean(key, v)?,
                "workers" => self.workers = num(key, v)?,
                "builtin_max_length" => self.builtin_max_length = num(key, v)?,
                "max_automaton_states" => self.max_automaton_states = num(key, v)?,
                "max_product_states" => self.max_product_states = num(key, v)?,
                "algorithm" => self.algorithm = v.parse()?,
                "fraction" => self.fraction = num(key, v)?,
                "split_seed" => self.split_seed = num(key, v)?,
                "sweep_fractions" => self.sweep_fractions = list(key, v)?,
                "sweep_seeds" => self.sweep_seeds = list(key, v)?,
                "rf_trees" => self.rf_trees = num(key, v)?,
                "rf_features" => self.rf_features = num(key, v)?,
                "max_depth" => self.max_depth = num(key, v)?,
                "min_samples_split" => self.min_samples_split = num(key, v)?,
                "knn_k" => self.knn_k = num(key, v)?,
                "lr_rate" => self.lr_rate = num(key, v)?,
                "lr_epochs" => self.lr_epochs = num(key, v)?,
                "lr_l2" => self.lr_l2 = num(key, v)?,
                "balance_threshold" => self.balance_threshold = num(key, v)?,
                "balance_regenerate" => self.balance_regenerate = boolean(key, v)?,
                "balance_retries" => self.balance_retries = num(key, v)?,
                _ => return Err(format!("unknown config key `{key}`")),
            }
            Ok(())
        })();
        r.map_err(PipelineError::Config)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "seed" => self.seed.to_string(),
            "count" => self.count.to_string(),
            "states_min" => self.states_min.to_string(),
            "states_max" => self.states_max.to_string(),
            "ap_count" => self.ap_count.to_string(),
            "edge_density" => self.edge_density.to_string(),
            "formula_length" => self.formula_length.to_string(),
            "operator_weights" => self.operator_weights.render(),
            "labeler" => self.labeler.name().to_string(),
            "nusmv" => self
                .nusmv
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            "timeout_seconds" => self.timeout_seconds.to_string(),
            "keep_temps" => self.keep_temps.to_string(),
            "workers" => self.workers.to_string(),
            "builtin_max_length" => self.builtin_max_length.to_string(),
            "max_automaton_states" => self.max_automaton_states.to_string(),
            "max_product_states" => self.max_product_states.to_string(),
            "algorithm" => self.algorithm.to_string(),
            "fraction" => self.fraction.to_string(),
            "split_seed" => self.split_seed.to_string(),
            "sweep_fractions" => join(&self.sweep_fractions),
            "sweep_seeds" => join(&self.sweep_seeds),
            "rf_trees" => self.rf_trees.to_string(),
            "rf_features" => self.rf_features.to_string(),
            "max_depth" => self.max_depth.to_string(),
            "min_samples_split" => self.min_samples_split.to_string(),
            "knn_k" => self.knn_k.to_string(),
            "lr_rate" => self.lr_rate.to_string(),
            "lr_epochs" => self.lr_epochs.to_string(),
            "lr_l2" => self.lr_l2.to_string(),
            "balance_threshold" => self.balance_threshold.to_string(),
            "balance_regenerate" => self.balance_regenerate.to_string(),
            "balance_retries" => self.balance_retries.to_string(),
            _ => return None,
        })
    }

    /// Applies a config file on top of `self`. Blank lines and `#` comments
    /// are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), PipelineError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                PipelineError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(k.trim(), v).map_err(|e| match e {
                PipelineError::Config(m) => PipelineError::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, PipelineError> {
        let mut c = Config::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Every key with its current value, one `key = value` per line.
    pub fn render(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("known key")))
            .collect()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        self.gen_spec(0).validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.count == 0 {
            return bad("count must be at least 1");
        }
        if !(self.fraction > 0.0 && self.fraction < 1.0) {
            return bad("fraction must lie strictly between 0 and 1");
        }
        if self.sweep_fractions.is_empty() || self.sweep_seeds.is_empty() {
            return bad("sweep grids must be nonempty");
        }
        if self
            .sweep_fractions
            .iter()
            .any(|f| !(*f > 0.0 && *f < 1.0))
        {
            return bad("sweep fractions must lie strictly between 0 and 1");
        }
        if self.timeout_seconds.is_nan() || self.timeout_seconds <= 0.0 {
            return bad("timeout_seconds must be positive");
        }
        if self.rf_trees == 0 || self.knn_k == 0 {
            return bad("rf_trees and knn_k must be at least 1");
        }
        if !(self.balance_threshold > 0.5 && self.balance_threshold <= 1.0) {
            return bad("balance_threshold must lie in (0.5, 1]");
        }
        Ok(())
    }

    /// Generation spec of the instance with the given seed.
    pub fn gen_spec(&self, seed: u64) -> GenSpec {
        GenSpec {
            seed,
            state_range: (self.states_min, self.states_max),
            ap_count: self.ap_count,
            edge_density: self.edge_density,
            formula_length: self.formula_length,
            operator_weights: self.operator_weights.clone(),
        }
    }

    pub fn limits(&self) -> CheckLimits {
        CheckLimits {
            max_automaton_states: self.max_automaton_states,
            max_product_states: self.max_product_states,
            ..CheckLimits::default()
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            fraction: self.fraction,
            seed: self.split_seed,
        }
    }

    /// Learner parameters; the forest is seeded with the split seed.
    pub fn params(&self, seed: u64) -> Params {
        Params {
            dt: DtParams {
                max_depth: self.max_depth,
                min_samples_split: self.min_samples_split,
            },
            rf: RfParams {
                n_trees: self.rf_trees,
                max_depth: self.max_depth,
                min_samples_split: self.min_samples_split,
                features_per_split: (self.rf_features > 0).then_some(self.rf_features),
                seed,
                bootstrap: true,
            },
            knn_k: self.knn_k,
            lr: LrParams {
                lr: self.lr_rate,
                epochs: self.lr_epochs,
                l2: self.lr_l2,
            },
        }
    }
}
