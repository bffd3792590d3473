//! Toolkit error type. CLI exit codes map onto these categories.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum CrError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("variable {0} has no conjugate partner")]
    NoConjugatePartner(String),

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("point does not lie on the set: {0}")]
    PointNotOnSet(String),

    #[error("sampling failed: {0}")]
    SamplingFailed(String),

    #[error("set is not a manifold of the expected kind: {0}")]
    BadManifold(String),

    #[error("reality check failed: {0}")]
    NotReal(String),

    #[error("computation exhausted its cap: {0}")]
    CapExhausted(String),

    #[error("numeric divergence: {0}")]
    Diverged(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CrError>;

impl CrError {
    pub fn parse(col: usize, msg: impl Into<String>) -> Self {
        CrError::Parse { line: 1, col, msg: msg.into() }
    }

    /// CLI exit code: 2 for malformed input, 3 for internal/numeric limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            CrError::Parse { .. }
            | CrError::UnknownVariable(_)
            | CrError::Unsupported(_)
            | CrError::BadInput(_)
            | CrError::Json(_)
            | CrError::Io(_) => 2,
            _ => 3,
        }
    }
}
