use thiserror::Error;

/// Errors produced by the benchmark library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("numeric failure in {module}: {detail}")]
    Numeric { module: &'static str, detail: String },

    #[error("trace parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("trace format error: {0}")]
    Format(String),

    #[error("inconsistent state: {0}")]
    State(String),

    #[error("trace exhausted: {needed} snapshots needed, {available} available")]
    TraceExhausted { needed: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}

pub(crate) fn numeric(module: &'static str, detail: impl Into<String>) -> Error {
    Error::Numeric {
        module,
        detail: detail.into(),
    }
}
