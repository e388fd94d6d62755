use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants are grouped so that front ends can map them to coarse exit
/// classes: input problems (`Parse`, `Domain`, `InvalidModel`) versus
/// numerical-regime problems (everything else).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("stability error: {0}")]
    Stability(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("ill-conditioned fit: {0}")]
    Conditioning(String),

    #[error("asymptotic fit not reached: {0}")]
    NonAsymptotic(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("routes disagree: {0}")]
    Consistency(String),

    #[error("recursion inconsistency: {0}")]
    Recursion(String),

    #[error("invertibility precondition violated: {0}")]
    NotInvertible(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-domain input rather
    /// than by the numerical regime of a valid model.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Domain(_) | Error::InvalidModel(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
