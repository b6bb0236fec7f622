use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the library. Variants map onto CLI exit codes
/// through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("HTTP status {status} fetching {url}")]
    HttpStatus { url: String, status: u16 },

    #[error("network error fetching {url}: {msg}")]
    Network { url: String, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} (attractor is Gaussian)")]
    GaussianAttractor(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("no convergence after {iterations} iterations (achieved {achieved:e})")]
    NoConvergence { iterations: usize, achieved: f64 },

    #[error("fit did not converge after {iterations} iterations; last iterate {}", fmt_params(.last))]
    FitFailed { iterations: usize, last: Vec<(String, f64)> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn fmt_params(p: &[(String, f64)]) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn insufficient(msg: impl Into<String>) -> Self {
        Error::Insufficient(msg.into())
    }

    /// 2 for input problems, 3 for degenerate data, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::Csv(_)
            | Error::HttpStatus { .. }
            | Error::Network { .. }
            | Error::InvalidArgument(_)
            | Error::Domain(_)
            | Error::GaussianAttractor(_) => 2,
            Error::Degenerate(_) | Error::Insufficient(_) => 3,
            Error::NoConvergence { .. } | Error::FitFailed { .. } => 1,
        }
    }
}
