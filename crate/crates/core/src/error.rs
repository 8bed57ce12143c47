use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown letter '{0}'")]
    UnknownLetter(char),

    #[error("relator {index} (\"{text}\") freely reduces to the empty word")]
    EmptyRelator { index: usize, text: String },

    #[error("word problem strategy not verified for presentation '{0}'")]
    StrategyNotVerified(String),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("insufficient radius for {what}: need {needed}, have {available}")]
    InsufficientRadius {
        what: String,
        needed: usize,
        available: usize,
    },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("combinatorial blowup: enumeration exceeded its budget of {0}")]
    CombinatorialBlowup(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn radius(what: impl Into<String>, needed: usize, available: usize) -> Self {
        Error::InsufficientRadius {
            what: what.into(),
            needed,
            available,
        }
    }
}
