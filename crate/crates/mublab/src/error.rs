//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {got}: {why}")]
    InvalidDimension { got: usize, why: &'static str },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state norm² deviates from 1 by {0:.3e}")]
    InvalidState(f64),

    #[error("unsupported dimension {0}: {1}")]
    UnsupportedDimension(usize, &'static str),

    #[error("{what} out of range: {got} not in [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        got: i64,
        lo: i64,
        hi: i64,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("ensemble is not basis-labelled")]
    UnlabeledEnsemble,

    #[error("basis label {label} holds {got} states, expected {expected}")]
    BadBasisLabel {
        label: usize,
        got: usize,
        expected: usize,
    },

    #[error("grid is not sorted ascending")]
    UnsortedGrid,

    #[error("curves were sampled on different grids")]
    GridMismatch,

    #[error("radial factor must be nonnegative, got {0}")]
    NegativeRadial(f64),

    #[error("probabilities sum to {0}, expected 1 within {1:.1e}")]
    ProbabilitySum(f64, f64),

    #[error("no feasible bitstring")]
    NoFeasible,

    #[error("objective returned a non-finite value at {at:?}")]
    NonFiniteObjective { at: Vec<f64> },

    #[error("paired records missing cases: {0:?}")]
    CaseKeyMismatch(Vec<String>),

    #[error("unknown strategy tag `{0}`")]
    UnknownStrategy(String),

    #[error("encoding invariant violated: {0}")]
    EncodingInvariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("result schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
