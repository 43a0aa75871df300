use thiserror::Error;

use crate::syntax::Dialect;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown dialect `{0}`")]
    UnknownDialect(String),

    #[error("dialect mismatch: expected {expected}, got {got}")]
    DialectMismatch { expected: Dialect, got: Dialect },

    #[error("no assignment for atom `{0}`")]
    MissingAssignment(String),

    #[error("node arity {arity} exceeds the cap {cap}; raise COSKIT_ARITY_CAP to proceed")]
    ArityCap { arity: usize, cap: usize },

    #[error("context must have exactly one hole, found {0}")]
    BadContextOrder(usize),

    #[error("endpoint mismatch: `{left}` vs `{right}`")]
    EndpointMismatch { left: String, right: String },

    #[error("rule {rule} has no dual inside {system}; the symmetric closure is {target}")]
    NoDualInSystem {
        rule: String,
        system: String,
        target: String,
    },

    #[error("unknown rule name `{0}`")]
    UnknownRule(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("rule {rule} is not part of system {system}")]
    RuleNotInSystem { rule: String, system: String },

    #[error("{0}")]
    Shape(String),

    #[error("derivation file: {0}")]
    File(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
