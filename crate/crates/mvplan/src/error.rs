//! Error types shared across the crate.

use thiserror::Error;

/// Syntax error with source position (1-based line and column).
#[derive(Debug, Clone, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(line: usize, col: usize, message: String) -> Self {
        ParseError { line, col, message }
    }
}

/// Errors raised while building or validating models, automata, and plans.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("state cap exceeded: {actual} states, cap {cap}")]
    StateCap { actual: usize, cap: usize },

    #[error("invalid lasso: {0}")]
    InvalidLasso(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("oracle cap exceeded: {0}")]
    OracleCap(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn invalid_lasso(msg: impl Into<String>) -> Self {
        Error::InvalidLasso(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
