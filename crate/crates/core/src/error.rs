use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state is not normalized: {0}")]
    NotNormalized(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid party: {0}")]
    InvalidParty(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ensemble is not bipartite ({0} parties)")]
    NotBipartite(usize),

    #[error("incomplete measurement at {path}: max deviation of sum K^dag K from identity is {deviation:.3e}")]
    IncompleteMeasurement { path: String, deviation: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("dimension too large for this operation: {0}")]
    TooLarge(String),

    #[error("certificate mismatch: claimed {claimed:.12}, replayed {replayed:.12}")]
    CertificateMismatch { claimed: f64, replayed: f64 },

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
