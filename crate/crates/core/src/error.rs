use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the phase-space toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the range the operation supports.
    #[error("configuration error: {0}")]
    Config(String),

    /// A mathematical precondition is violated (e.g. a non-positive noise factor).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested evaluation cannot meet its accuracy contract.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Moving a sampled grid toward larger sigma is a deconvolution.
    #[error("cannot deconvolve a sampled grid from sigma={from} to sigma={to}; use the Gaussian analytic path")]
    UnsupportedDeconvolution { from: f64, to: f64 },

    /// Two grids (or a grid and its data) disagree on extent or resolution.
    #[error("configuration error: grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// The exponent matrix fails the positivity criterion.
    #[error("exponent matrix is not separable: {0}")]
    NotSeparable(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
