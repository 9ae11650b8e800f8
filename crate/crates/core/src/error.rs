use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("no angle assigned to event {0}")]
    MissingAngle(usize),

    #[error("basis mismatch: expected {expected}, got {got}")]
    BasisMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) => 3,
            Error::Numeric(_) | Error::NotHermitian(_) | Error::NoConvergence(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
