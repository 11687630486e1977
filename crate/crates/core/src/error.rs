use thiserror::Error;

/// Errors produced by the measurement workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("rational approximant denominator is singular")]
    SingularApproximant,

    #[error("coordinate index {index} out of range for {dim} canonical coordinates")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("term list is not Hermitian: anti-Hermitian constant i*hbar*{constant} does not cancel")]
    NonHermitianTerms { constant: f64 },

    #[error("observables or states belong to incompatible mode systems")]
    SystemMismatch,

    #[error("mode map is invalid: {0}")]
    InvalidModeMap(String),

    #[error("inadmissible Gaussian preparation for mode {mode}: {reason}")]
    Inadmissible { mode: usize, reason: String },

    #[error("unphysical moments: minimum eigenvalue of cov + i(hbar/2)Omega is {min_eigenvalue:e}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("interval probabilities need a Gaussian state; this state only carries moments")]
    NotGaussian,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid boundary mass {mass:e} exceeds threshold {threshold:e} after {stage}")]
    BoundaryMass {
        mass: f64,
        threshold: f64,
        stage: &'static str,
    },

    #[error("grid state is not pure: {0}")]
    NotPure(String),

    #[error("model `{0}` has no wavefunction-level realization on the grid")]
    UnsupportedModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
