use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated (dimensions, ranges, empty sets, …).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The subdifferential of the regularizer at the target point contains 0,
    /// so the descent cone is the whole space and no width bound applies.
    #[error("degenerate subdifferential: {0}")]
    Degenerate(String),

    /// A factorization failed; the measurement matrix does not have the
    /// required full rank.
    #[error("rank-deficient matrix: {0}")]
    RankDeficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
