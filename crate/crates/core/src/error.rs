use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: bad vertex labels, wrong set sizes, out-of-range parameters.
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation was asked to do something its precondition forbids,
    /// e.g. adding an edge that is not available.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Exact enumeration gave up after visiting `limit` search nodes.
    #[error("enumeration budget of {limit} nodes exceeded")]
    Budget { limit: u64 },

    /// A trajectory function was evaluated outside where it is defined.
    #[error("outside domain: {0}")]
    Domain(String),

    /// The quantity has no value in this state (e.g. an average over an empty set).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
