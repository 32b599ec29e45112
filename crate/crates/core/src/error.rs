use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("sort error in `{term}`: {msg}")]
    Sort { term: String, msg: String },

    #[error("`{symbol}` is not part of the {theory} signature")]
    Signature { symbol: String, theory: String },

    #[error("formula is not closed; free variables: {0}")]
    NotClosed(String),

    #[error("formula is inconsistent: {0}")]
    Inconsistent(String),

    #[error("algebraic type has no realization outside the avoid set")]
    AlgebraicExhausted,

    #[error("type is algebraic: {0}")]
    Algebraic(String),

    #[error("rank cap {cap} reached")]
    CapReached { cap: usize },

    #[error("search undecided within bounds: {0}")]
    Undecided(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("certificate rejected: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
