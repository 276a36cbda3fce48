use thiserror::Error;

use crate::report::Report;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Leaf triple whose separating vertices induce different partitions.
    #[error("triple ({}, {}, {}) has inconsistent branch partitions", .0[0], .0[1], .0[2])]
    TripleMismatch([String; 3]),

    #[error("corrupt cover: {0}")]
    CorruptCover(String),

    #[error("seed rejected:\n{0}")]
    SeedRejected(Report),

    #[error("construction failed:\n{0}")]
    Construction(Report),

    #[error("malformed document: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
