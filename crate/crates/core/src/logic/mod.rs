//! LTL formulas, Kripke structures and their seeded generators.

mod formula;
mod gen;
mod kripke;
mod nnf;
mod parse;

use thiserror::Error;

pub use formula::{format_ltl, formula_length, Formula, NodeKind};
pub(crate) use formula::{write_formula, Spelling};
pub use gen::{
    default_alphabet, random_formula, random_kripke, GenError, GenSpec, OperatorWeights,
    FORMULA_STREAM, INITIAL_PROBABILITY, KRIPKE_STREAM,
};
pub use kripke::{
    is_identifier, parse_kripke, parse_kripke_at, validate_kripke, KripkeParseError,
    KripkeStructure, LabelSet, Violation, MAX_ALPHABET, RESERVED_NAMES,
};
pub use nnf::{is_nnf, to_nnf};
pub use parse::parse_ltl;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown atom `{name}` at offset {position}")]
    UnknownAtom { name: String, position: usize },
}

impl LtlError {
    pub(crate) fn syntax(position: usize, message: impl Into<String>) -> Self {
        LtlError::Syntax {
            position,
            message: message.into(),
        }
    }
}
