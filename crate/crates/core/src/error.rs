use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("permutation has {perm} entries but the graph has {graph} vertices")]
    DimensionMismatch { graph: usize, perm: usize },

    #[error("transposition needs two distinct vertices, got {0} twice")]
    SameVertex(usize),

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph with {n} vertices exceeds the limit of {limit} for {what}")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("at least {min} vertices required, got {n}")]
    TooFewVertices { n: usize, min: usize },

    #[error("graph has no edges")]
    NoEdges,

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(#[from] toml::de::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures caused by bad user input rather than the environment.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::Parse(_) | Error::Config(_) | Error::TooLarge { .. })
    }

    pub fn is_io_error(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}
