use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix function undefined at eigenvalue {eigenvalue:e}")]
    FunctionDomain { eigenvalue: f64 },

    /// Parameter outside the domain of a model operation (e.g. T <= 0).
    #[error("{0}")]
    Domain(String),

    #[error("measurement branch has negligible probability {probability:e}")]
    DegenerateBranch { probability: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
