use thiserror::Error;

use crate::fan::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("cone {0} is not a cone of the fan")]
    UnknownCone(String),

    #[error("point {0} lies outside the support of the fan")]
    OutOfSupport(String),

    /// The Weil divisor has no integral local equation on this maximal cone.
    #[error("divisor is not Cartier on cone {cone:?}")]
    NotCartier { cone: Vec<usize> },

    #[error("support function of the polytope is not linear on cone {cone:?}")]
    IncompatibleFan { cone: Vec<usize> },

    #[error("invalid fan: {0}")]
    InvalidFan(ValidationReport),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::Dimension { expected, found })
        }
    }
}
