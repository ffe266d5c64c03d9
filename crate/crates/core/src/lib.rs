//! Workbench for predicting LTL model-checking verdicts.
//!
//! The crate generates (Kripke structure, formula) instances, labels them
//! with an explicit-state model checker (or an external NuSMV run), encodes
//! them as fixed-width feature vectors and trains classical classifiers to
//! predict the verdict, reporting accuracy, AUC and prediction speedup.

pub mod checker;
pub mod features;
pub mod learners;
pub mod logic;
pub mod pipeline;
pub mod rng;
pub mod smv;
