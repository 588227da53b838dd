use std::path::PathBuf;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "quadrature did not converge: estimate {estimate}, error bound {error} > tolerance {tol}"
    )]
    QuadratureNonConvergence { estimate: f64, error: f64, tol: f64 },

    #[error("hedge state: {0}")]
    Hedge(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest: {0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
