use thiserror::Error;

/// Errors raised anywhere in the bounds engine or the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e}, allowed {allowed:.3e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("not normalized: {what} sums to {total}")]
    NotNormalized { what: &'static str, total: f64 },

    #[error("size exceeded: {what} needs dimension {requested}, limit is {limit}")]
    SizeExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("generator has a single distinct eigenvalue")]
    DegenerateSpectrum,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("density operator has eigenvalue {value:.3e} below the round-off floor")]
    NegativeEigenvalue { value: f64 },

    #[error("support of the first argument is not contained in the support of the second")]
    SupportViolation,

    #[error("generator variance is zero")]
    ZeroVariance,

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("component built from {qubits} qubit(s) with q = {power} has zero eigenvalue gap")]
    DegenerateComponent { qubits: u32, power: u32 },

    #[error("grid of {grid} points is too coarse for a maximum gap of {max_gap}")]
    GridTooCoarse { grid: usize, max_gap: u64 },

    #[error("insufficient samples: {trials} trials, need at least {required} for {bins} bins")]
    InsufficientSamples {
        trials: usize,
        required: usize,
        bins: usize,
    },

    #[error("eigenbasis is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("generator eigenvalue {value} is not an integer")]
    NonIntegerSpectrum { value: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),
}

pub type Result<T> = std::result::Result<T, Error>;
