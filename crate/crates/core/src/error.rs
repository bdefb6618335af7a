use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("complex has no generators")]
    NoGenerators,

    #[error("arrow {index} ({from} -> {to}) violates the exponent law: {reason}")]
    ArrowExponent {
        index: usize,
        from: usize,
        to: usize,
        reason: String,
    },

    #[error("invalid complex: {0}")]
    Invalid(String),

    #[error("no lift exists: the d^2 = 0 system is inconsistent")]
    NoLift,

    #[error("thickness {0} needs lift enumeration; the unique-lift path covers thickness <= 1")]
    ThicknessTooLarge(i64),

    #[error("kernel too large: dimension {dim} exceeds cap {cap}")]
    KernelTooLarge { dim: usize, cap: usize },

    #[error("the d^2 = 0 system has degree-two terms; use lift enumeration")]
    Nonlinear,

    #[error("truncation bound {given} is below the required {required}")]
    TruncationTooSmall { given: i64, required: i64 },

    #[error("input is not a differential: {0}")]
    NotADifferential(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
