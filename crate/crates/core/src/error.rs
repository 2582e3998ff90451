use thiserror::Error;

/// Errors produced by the statistics, variance and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A (sub)sample is too short to support the requested estimator.
    #[error("degenerate {which}: {detail}")]
    DegenerateSegment { which: &'static str, detail: String },

    /// A long-run scale estimate came out exactly zero, so the test
    /// statistic cannot be normalized.
    #[error("zero scale: {0}")]
    ZeroScale(String),

    /// The sample variance is zero (constant data) where a correlation
    /// estimate was required.
    #[error("zero variance: {0}")]
    ZeroVariance(String),

    /// The circulant embedding produced an eigenvalue below tolerance.
    /// Cannot happen for fractional Gaussian noise; guarded regardless.
    #[error("circulant embedding failed: eigenvalue {min_eigenvalue} below -1e-9")]
    EmbeddingFailure { min_eigenvalue: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
