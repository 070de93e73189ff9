use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("simplex {0:?} is not a face of the complex")]
    NotAFace(Vec<usize>),

    #[error("the trivial subgroup is not admitted here")]
    TrivialSubgroup,

    #[error("wrong rank: expected {expected}, got {got}")]
    WrongRank { expected: usize, got: usize },

    #[error("not a basis: {0}")]
    NotABasis(String),

    #[error("interval bounds are not comparable")]
    BoundsNotComparable,

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("matrix is not unimodular: {0}")]
    NotUnimodular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("desk-scale guard: {0} (pass allow_large to override)")]
    DeskScale(String),

    #[error("resource cap exceeded while {what} (limit {limit}); partial progress: {progress}")]
    ResourceCap {
        what: &'static str,
        limit: usize,
        progress: String,
    },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
