use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by an identically zero denominator")]
    ZeroDenominator,
    #[error("denominator {0} is not a unit of the trigonometric ring")]
    NotInvertible(String),
    #[error("symbol {0} is not allowed in this expression kind")]
    ForeignSymbol(String),
    #[error("state outside the physical domain: {0}")]
    Domain(String),
    #[error("invalid frequency ratio: {0}")]
    InvalidRatio(String),
    #[error("unbound symbol {0} during numeric evaluation")]
    Unbound(&'static str),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("eigen-solver failure: {0}")]
    Spectral(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
