use thiserror::Error;

/// Errors raised while building models or running recurrence queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("map entry {index} is {value}, out of range for {len} points")]
    MapOutOfRange { index: usize, value: usize, len: usize },

    #[error("map has {got} entries but the space has {expected} points")]
    MapLength { got: usize, expected: usize },

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("capacity exceeded: {requested} > cap {cap} ({what})")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("invalid metric transform: {0}")]
    InvalidTransform(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
