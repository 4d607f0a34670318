use thiserror::Error;

/// Every failure the analyses can report.
///
/// The variants map one-to-one onto the CLI exit-code contract: resource
/// exhaustion is distinguished from precondition and input failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource budget exceeded: {what} (bound {bound})")]
    Budget { what: String, bound: u64 },

    #[error("omega-limit surrogate is not infinite: {0}")]
    NotInfinite(String),

    #[error("orbit not aligned with the periodic portion: {0}")]
    NotAligned(String),

    #[error("point lies outside every padded cell: {0}")]
    Outside(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("construction stalled: {0}")]
    Stalled(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn budget(what: impl Into<String>, bound: u64) -> Self {
        Error::Budget {
            what: what.into(),
            bound,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
