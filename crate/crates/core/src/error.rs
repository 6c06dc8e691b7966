use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by spectrum computation, sensing, recovery and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum HosError {
    #[error("signal length must be at least 1")]
    EmptySignal,

    #[error("real signal has a non-zero imaginary part at index {0}")]
    NonRealEntry(usize),

    #[error("spectrum order q = {0} is too low; q >= 3 is required")]
    SpectrumOrderTooLow(usize),

    #[error("spectrum of length {n}^{exponent} exceeds the cap of {cap} entries")]
    DimensionOverflow { n: usize, exponent: usize, cap: usize },

    #[error("invalid group element (shift {shift}, scale index {scale}) for N = {n}, q = {q}")]
    InvalidGroupElement { shift: usize, scale: usize, n: usize, q: usize },

    #[error("sampling mask asks for {k} samples but the spectrum has only {r} entries")]
    TooManySamples { k: usize, r: usize },

    #[error("operator needs at least one row")]
    NoRows,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("objective became non-finite in every start")]
    NonFiniteObjective,

    #[error("truth signal has zero norm")]
    ZeroTruthSignal,

    #[error("recovery assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, HosError>;
