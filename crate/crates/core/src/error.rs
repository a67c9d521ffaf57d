use thiserror::Error;

/// Errors produced by sequence construction, parsing, and verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pulse pair ({i}, {j}): indices must satisfy 1 <= i < j")]
    InvalidPair { i: usize, j: usize },

    #[error("pulse ({i}, {j}) out of range for {n} spins")]
    PulseOutOfRange { i: usize, j: usize, n: usize },

    #[error("duration {value} out of range [0, 2)")]
    DurationRange { value: String },

    #[error("duration denominator {denom} exceeds maximum {max}")]
    DurationDenominator { denom: i64, max: i64 },

    #[error("malformed rational literal `{text}`")]
    MalformedRational { text: String },

    #[error("dimension mismatch: {lhs} vs {rhs}")]
    DimensionMismatch { lhs: usize, rhs: usize },

    #[error("invalid coupling tree: {0}")]
    InvalidTree(String),

    #[error("sz = {sz} not reachable for total spin {total}")]
    SzOutOfRange { sz: String, total: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("rewrite step rejected at position {pos}: {msg}")]
    StepRejected { pos: usize, msg: String },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("structural check `{name}` failed (residual {residual:.3e})")]
    Structural { name: &'static str, residual: f64 },

    #[error("no constraint solutions found")]
    NoSolutions,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
