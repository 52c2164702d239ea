use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("vector length {got} does not match rank {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("element is not an involution")]
    NotAnInvolution,
    #[error("element is not a member of {0}")]
    NotAMember(String),
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: String, rank: usize },
    #[error("descriptor is not realizable: {0}")]
    Unrealizable(String),
    #[error("descriptor outside the constructive cases: {0}")]
    OutsideConstructiveCases(String),
    #[error("elements lie in different conjugacy classes")]
    ClassMismatch,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("window holds at least {nodes} vertices, exceeding the cap of {cap}")]
    BudgetExceeded { nodes: usize, cap: usize },
    #[error("sigma has a cycle of length > 2; not expressible in labelled cycle text")]
    NotCycleText,
    #[error("integer overflow in translation arithmetic")]
    Overflow,
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
