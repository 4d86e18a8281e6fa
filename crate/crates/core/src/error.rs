use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants split into two families that the command-line front end maps
/// onto distinct exit codes: input/configuration problems and computations
/// that have no finite answer for otherwise valid inputs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("distribution not normalized: {what} sums to {sum}")]
    NotNormalized { what: String, sum: f64 },

    #[error("invalid probability in {what}: {value}")]
    InvalidProbability { what: String, value: f64 },

    #[error("empty source subset")]
    EmptySubset,

    #[error("index out of range: {0}")]
    InvalidIndex(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("no finite codeword length: {0}")]
    Infeasible(String),

    #[error("rho -> 0 extrapolation did not converge: {0}")]
    NonConvergent(String),

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("rate vector is not strictly inside the region (scale factor {lambda})")]
    NotInterior { lambda: f64 },

    #[error("too few departures for statistics: {0}")]
    TooFewDepartures(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the binary: 3 for computations that are
    /// infeasible on valid input, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_)
            | Error::NonConvergent(_)
            | Error::Solver(_)
            | Error::NotInterior { .. }
            | Error::TooFewDepartures(_) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
