use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "point lies on the coalescence set (distance {distance:e}); gradient is undefined there"
    )]
    SingularPoint { distance: f64 },

    #[error("quadrature produced a non-finite value at node {node}")]
    NonFiniteQuadrature { node: usize },

    #[error("operator assembly is not Hermitian: max asymmetry {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "blocks {first} and {second} violate the orthogonality precondition (overlap {overlap:e})"
    )]
    NotOrthogonal {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("fit window [{start}, {end}] is degenerate: need at least 5 positive values")]
    DegenerateWindow { start: usize, end: usize },

    #[error("insufficient dynamic range: {decades:.2} decades available, need {required:.2}")]
    InsufficientRange { decades: f64, required: f64 },

    #[error("aliasing guard: {points} points per axis cannot resolve frequency {max_frequency} (need at least {required})")]
    Aliasing {
        points: usize,
        max_frequency: usize,
        required: usize,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("I/O failure on `{path}`")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config `{path}`: {message}")]
    Config { path: PathBuf, message: String },

    #[error("serialization failure: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(err: ndarray_linalg::error::LinalgError) -> Self {
        Error::LinearAlgebra(err.to_string())
    }
}
