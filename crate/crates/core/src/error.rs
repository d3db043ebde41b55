use thiserror::Error;

/// Errors raised by environment construction, planners, solvers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{field}` must be finite and positive, got {value}")]
    Parameter { field: &'static str, value: f64 },

    #[error("invalid argument `{field}`: {reason}")]
    Argument { field: &'static str, reason: String },

    #[error("{policy} requires {required}, got v = {v}")]
    Regime {
        policy: &'static str,
        required: &'static str,
        v: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("graph contains a cycle; longest path is only defined on acyclic graphs (v >= 1)")]
    Cycle,

    #[error("instance with {n} points exceeds the exact solver cap of {cap}; use the heuristic")]
    TooLarge { n: usize, cap: usize },

    #[error("malformed input at line {line}: {reason}")]
    Format { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
