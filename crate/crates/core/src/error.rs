use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rank {0}: rank must be at least 1")]
    InvalidRank(i64),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("not a positive root: {0}")]
    NotARoot(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series has no finite q floor")]
    NoFloor,
    #[error("constant term is not a unit")]
    NotAUnit,
    #[error("comparison order {requested} exceeds exactness horizon {horizon}")]
    BeyondHorizon { requested: i64, horizon: i64 },
    #[error("no exactness horizon: variable {0} is unbounded under a negative shift")]
    NoHorizon(usize),
    #[error("window {window} too small, need at least {needed}")]
    WindowTooSmall { window: i64, needed: i64 },
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
