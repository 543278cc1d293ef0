use std::io;

use thiserror::Error;

/// Broad failure class, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed record `{id}`: {reason}")]
    MalformedRecord { id: String, reason: String },

    #[error("duplicate record id `{0}`")]
    DuplicateId(String),

    #[error("unknown residue in record `{id}` at position {position}")]
    UnknownResidue { id: String, position: usize },

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("configuration conflict: {0}")]
    ConfigConflict(String),

    #[error("configuration line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("training set is empty")]
    EmptyTraining,

    #[error("record `{0}` has no gold labels")]
    MissingGold(String),

    #[error("numerical failure{}: {detail}", id.as_ref().map(|i| format!(" in record `{i}`")).unwrap_or_default())]
    NumericalFailure { id: Option<String>, detail: String },

    #[error("no feasible state path through the trellis")]
    InfeasibleTopology,

    #[error("state path is not allowed by the topology at position {position}")]
    InfeasiblePath { position: usize },

    #[error("gold/prediction pair {index} has mismatched lengths ({gold} vs {predicted})")]
    MalformedPair {
        index: usize,
        gold: usize,
        predicted: usize,
    },

    #[error("no predicted helices to analyse")]
    EmptyAnalysis,

    #[error("incompatible model: {0}")]
    IncompatibleModel(String),

    #[error("model file line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NumericalFailure { .. } | Error::InfeasibleTopology => ErrorClass::Numerical,
            Error::ConfigConflict(_) | Error::Config { .. } => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
