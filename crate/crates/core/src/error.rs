use thiserror::Error;

/// Errors raised by the potential-theory and Jacobi-matrix routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A gap set failed validation; `interval` names the offending gap when there is one.
    #[error("invalid gap set: {reason}{}", fmt_interval(.interval))]
    InvalidSet {
        reason: String,
        interval: Option<(f64, f64)>,
    },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Argument outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A linear solve or root bracketing failed.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Lanczos produced a nonpositive off-diagonal coefficient.
    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    /// The requested sum rule does not apply to the given data.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn fmt_interval(interval: &Option<(f64, f64)>) -> String {
    match interval {
        Some((a, b)) => format!(" (offending interval ({a}, {b}))"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn set(reason: impl Into<String>, interval: Option<(f64, f64)>) -> Self {
        Error::InvalidSet {
            reason: reason.into(),
            interval,
        }
    }

    /// True for failures of the numerics, false for rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Solver(_) | Error::Breakdown(_) | Error::Inapplicable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
