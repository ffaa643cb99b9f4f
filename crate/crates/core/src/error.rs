use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("p = {0} is too small (p > 3 required)")]
    PrimeTooSmall(u32),
    #[error("unknown group '{0}'")]
    UnknownGroup(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("group of order {order} exceeds the cap of {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("invalid maps: {0}")]
    InvalidMaps(String),
    #[error("malformed table file: {0}")]
    MalformedTable(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
