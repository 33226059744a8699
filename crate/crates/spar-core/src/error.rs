use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// A model parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    /// A root search could not bracket a sign change.
    #[error("root not bracketed: {0}")]
    NotBracketed(&'static str),
    /// An integral grows without bound as its range is extended.
    #[error("divergent integral")]
    Divergent,
    /// The requested combination has no implementation (for example no closed form).
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
