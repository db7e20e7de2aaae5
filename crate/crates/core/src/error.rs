//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("need at least 2 methods, got {0}")]
    TooFewMethods(usize),

    #[error("matrix contains no dataset rows")]
    EmptyMatrix,

    #[error("non-finite value for method `{method}` on dataset `{dataset}`")]
    NonFiniteValue { dataset: String, method: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no critical value tabulated for k = {0} (supported: 2..=20)")]
    UnsupportedK(usize),

    #[error("unsupported significance level {0}; tabulated levels are 0.05 and 0.10")]
    UnsupportedAlpha(f64),

    #[error("unknown scenario id {0} (valid ids: 1..=6)")]
    UnknownScenario(u32),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("report has no {0} section")]
    MissingMode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
