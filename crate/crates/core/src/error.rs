use thiserror::Error;

/// Errors produced by the model, analysis and relaxation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("Jacobi diagonalization did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("state is not normalized (|norm - 1| = {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("insufficient data: {have} points, need at least {need}")]
    InsufficientData { have: usize, need: usize },

    #[error("singular normal matrix: parameters `{first}` and `{second}` are degenerate")]
    DegenerateParameters { first: String, second: String },

    #[error("dataset: {0}")]
    Dataset(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Short machine-readable tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::NonFinite(_) => "non_finite",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NotNormalized { .. } => "not_normalized",
            Error::InvalidRange(_) => "invalid_range",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::DegenerateParameters { .. } => "degenerate_parameters",
            Error::Dataset(_) => "dataset",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
