//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Text input (partition grammar, JSON) could not be parsed.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Structurally invalid input that is not a plain syntax error.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    /// A graph of matrices failed validation; the message lists every violation.
    #[error("invalid graph of matrices: {0}")]
    Invalid(String),

    /// Brute-force summation would exceed the configured number of index assignments.
    #[error("term cap exceeded: {terms} index assignments, cap is {cap}")]
    TermCapExceeded { terms: u128, cap: u128 },

    /// A level of the operator factorization is too wide to materialize.
    #[error("level width cap exceeded: {0}")]
    LevelCapExceeded(String),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
