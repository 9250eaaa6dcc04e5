use thiserror::Error;

/// Errors raised by the spectral computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("step size underflow at z = {z} (h = {h:e})")]
    StepSizeUnderflow { z: f64, h: f64 },

    #[error("integrator exceeded {max_steps} steps before reaching z = {target}")]
    MaxStepsExceeded { max_steps: usize, target: f64 },

    #[error("potential is not in canonical form (q2 != -q1 on the check grid, max deviation {deviation:e})")]
    NotCanonicalForm { deviation: f64 },

    #[error("operation requires absolutely continuous entries; {what} is given by samples only")]
    AcRequired { what: &'static str },

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("derivative mismatch at lambda = {lambda}: formula {formula:e}, finite difference {finite_difference:e}")]
    DerivativeMismatch {
        lambda: f64,
        formula: f64,
        finite_difference: f64,
    },

    #[error("could not bracket root for index {index} after {doublings} doublings")]
    BracketFailure { index: i64, doublings: u32 },

    #[error("eigenvalue indexing chain violated at k = {k}: {detail}")]
    IndexingViolation { k: i64, detail: String },

    #[error("assertion failed at index {index}: {detail}")]
    AssertionFailure { index: i64, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl SpectralError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            SpectralError::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            SpectralError::MaxStepsExceeded { .. } => "MaxStepsExceeded",
            SpectralError::NotCanonicalForm { .. } => "NotCanonicalForm",
            SpectralError::AcRequired { .. } => "ACRequired",
            SpectralError::UnsupportedRepresentation(_) => "UnsupportedRepresentation",
            SpectralError::DerivativeMismatch { .. } => "DerivativeMismatch",
            SpectralError::BracketFailure { .. } => "BracketFailure",
            SpectralError::IndexingViolation { .. } => "IndexingViolation",
            SpectralError::AssertionFailure { .. } => "AssertionFailure",
            SpectralError::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, SpectralError>;
