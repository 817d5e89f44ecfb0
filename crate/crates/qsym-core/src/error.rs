use alloc::string::String;

/// Errors raised by evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QError {
    #[error("precision must be between {min} and {max} decimal digits, got {got}")]
    Precision { got: u32, min: u32, max: u32 },
    #[error("q must stay away from 1 and -1 (q - 1/q is too small)")]
    DegenerateQ,
    #[error("non-generic input: {0} is numerically zero")]
    NonGeneric(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series or product did not meet its tail bound within {0} terms")]
    Convergence(usize),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
}

pub type Result<T, E = QError> = core::result::Result<T, E>;
