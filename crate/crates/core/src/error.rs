use thiserror::Error;

/// Errors raised by kernel evaluation, quadrature and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Green function was requested on the diagonal where it diverges.
    #[error("diagonal singularity: x = y with alpha = {alpha} <= d = {d}")]
    Diagonal { alpha: f64, d: usize },

    /// Adaptive quadrature ran out of subdivisions before meeting the tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// Invalid configuration (parameters, path settings, CLI input).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
