use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two points (or a point and the origin, for symplectic input) are
    /// closer than the separation guard allows.
    #[error("degenerate configuration: minimum separation {min_sep:e} vs diameter {diameter:e}")]
    Degenerate { min_sep: f64, diameter: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
