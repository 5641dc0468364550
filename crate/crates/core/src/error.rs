use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("{d1} does not divide {d}")]
    NotDivisor { d: usize, d1: usize },
    #[error("tags are not orthogonal: {0}")]
    TagsNotOrthogonal(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
