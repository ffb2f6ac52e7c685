use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension d = {0} (pointwise evaluation needs d in {{2, 3}})")]
    UnsupportedDimension(usize),
    #[error("quadrature exact to degree {have}, need at least {need}")]
    InsufficientQuadrature { have: usize, need: usize },
    #[error("singular kernel: {0}")]
    SingularKernel(String),
    #[error("multiplier `{label}` is not invertible at degree {ell}")]
    NotInvertible { label: String, ell: usize },
    #[error("expected {expected} companions, got {got}")]
    CompanionMismatch { expected: usize, got: usize },
    #[error("singular least-squares system at degree {0}")]
    SingularSystem(usize),
    #[error("spectrum mismatch: {0}")]
    Mismatch(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
