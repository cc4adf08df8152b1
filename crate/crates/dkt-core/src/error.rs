use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number {j}: 2j must be a positive integer")]
    InvalidSpin { j: f64 },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("matrix is not unitary: max |U\u{2020}U - 1| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("eigenvalue modulus deviates from 1 by {deviation:.3e}: input is not unitary")]
    NonUnimodularSpectrum { deviation: f64 },

    #[error("state vector norm {norm} deviates from 1 beyond {tolerance:.1e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a valid single-qubit density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    #[error("only {valid} spacing ratios remain after degeneracy filtering (need at least {min})")]
    TooFewRatios { valid: usize, min: usize },

    #[error("histogram bin edges do not match")]
    BinEdgeMismatch,

    #[error("spectrum too short for order {order}: length {len}")]
    SpectrumTooShort { order: usize, len: usize },

    #[error("qubit count {n} must be {expected_parity} for this identity")]
    WrongParity { n: usize, expected_parity: &'static str },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCountRange { n: usize, min: usize, max: usize },

    #[error("linear algebra backend error: {0}")]
    LinAlg(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
