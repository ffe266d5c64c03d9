//! Experiment orchestration: generate, label, featurize, train, evaluate,
//! benchmark and sweep, with file artifacts between steps.

mod bench;
mod commands;
mod config;
mod dataset;

use std::path::PathBuf;

use thiserror::Error;

use crate::features::FeatureCsvError;
use crate::learners::LearnError;
use crate::logic::GenError;
use crate::smv::SmvError;

pub use bench::{bench_report, percent, BenchReport};
pub use commands::*;
pub use config::{Config, LabelerChoice, KEYS};
pub use dataset::{
    parse_timing, timing_path, Dataset, DatasetParseError, Failure, Label, Labeler, Record,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: DatasetParseError,
    },
    #[error("feature file {}: {source}", path.display())]
    Features {
        path: PathBuf,
        #[source]
        source: FeatureCsvError,
    },
    #[error("generation error: {0}")]
    Gen(#[from] GenError),
    #[error("labeling failed for all {0} instances")]
    AllFailed(usize),
    #[error("data error: {0}")]
    Data(String),
    #[error("learner error: {0}")]
    Learn(#[from] LearnError),
    #[error("missing timing fields: {0}")]
    MissingTiming(String),
    #[error("external checker: {0}")]
    External(#[from] SmvError),
}

impl PipelineError {
    /// Process exit code for this error's category.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Gen(_) => 2,
            PipelineError::Parse { .. } | PipelineError::Features { .. } => 3,
            PipelineError::Io { .. } => 4,
            PipelineError::AllFailed(_) => 5,
            PipelineError::Data(_) | PipelineError::Learn(_) | PipelineError::MissingTiming(_) => {
                6
            }
            PipelineError::External(_) => 7,
        }
    }

    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "parse",
            4 => "io",
            5 => "labeling",
            6 => "data",
            _ => "external",
        }
    }
}
