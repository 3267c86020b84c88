use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Input data contained NaN or infinite entries.
    #[error("non-finite numeric input: {0}")]
    NumericInput(String),

    /// A two-site gate was requested on sites that are not chain neighbours.
    #[error("two-site gate on non-adjacent sites ({0}, {1}) requires routing")]
    RoutingRequired(usize, usize),

    /// A dense or enumerating oracle was asked for a system beyond its limit.
    #[error("capacity exceeded: {what} supports at most {max} sites, got {got}")]
    Capacity {
        what: &'static str,
        max: usize,
        got: usize,
    },

    /// Numerical post-condition failed (e.g. complex residual in a real
    /// expectation value).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("optimizer aborted: {0}")]
    OptimizerAborted(String),

    #[error("preparation failed at beta={beta}: {diagnostics}")]
    PreparationFailed { beta: f64, diagnostics: String },

    #[error("extrapolation failed: {0}")]
    ExtrapolationFailed(String),

    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("beta grids do not join; unmatched beta values: {0:?}")]
    Join(Vec<f64>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
