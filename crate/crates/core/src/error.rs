use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("information matrix is not positive semidefinite (det = {det:e})")]
    InvalidMatrix { det: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("responses are separated; the maximum likelihood estimate is not finite")]
    Separation,

    #[error("fitted slope {0} is not positive")]
    NonPositiveSlope(f64),

    #[error("grid upper bound {d_max} is below the reachable criterion {required}")]
    GridTooSmall { d_max: f64, required: f64 },

    #[error("rejected {rate:.3} of parameter draws at D = {d} (limit 0.5)")]
    ExcessiveRejection { d: f64, rate: f64 },

    #[error("search space of {size:e} exceeds the cap {cap:e}")]
    SearchTooLarge { size: f64, cap: f64 },

    #[error("initialization failed after {0} escalations")]
    InitializationFailed(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Separation
                | Error::NonPositiveSlope(_)
                | Error::InvalidMatrix { .. }
                | Error::GridTooSmall { .. }
                | Error::ExcessiveRejection { .. }
                | Error::SearchTooLarge { .. }
                | Error::InitializationFailed(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
