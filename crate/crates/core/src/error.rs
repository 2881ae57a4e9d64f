use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least 3")]
    InvalidModulus(u64),

    #[error("residue {residue} is not a unit modulo {modulus}")]
    InvalidResidue { modulus: u64, residue: u64 },

    #[error("invalid race: {0}")]
    InvalidRace(String),

    #[error("empty range [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },

    #[error("range bound {0} exceeds 2^63")]
    RangeTooLarge(u64),

    #[error("checkpoint format error: {0}")]
    CheckpointFormat(String),

    #[error("zero file {path}: {reason}")]
    ZeroFormat { path: PathBuf, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("duplicate residue class {0} in tuple")]
    DuplicateClass(u64),

    #[error("missing zero data for modulus {modulus}, characters {characters:?}")]
    MissingZeroData { modulus: u64, characters: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
