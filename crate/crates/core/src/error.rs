use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("walk left the complete region at prefix {prefix:?}")]
    Frontier { prefix: Vec<usize> },
    #[error("resource cap exceeded: {what} > {limit}")]
    ResourceCap { what: String, limit: usize },
    #[error("region too small: {0}")]
    RegionTooSmall(String),
    #[error("singular linear system")]
    Singular,
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
