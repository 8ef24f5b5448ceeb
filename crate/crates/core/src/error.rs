use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("series did not converge within {terms} terms (last term {last_term:e})")]
    IterationLimit { terms: usize, last_term: f64 },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("step size underflow at rho = {rho} (h = {step:e})")]
    Stiffness { rho: f64, step: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Domain(_) | Error::Range(_) | Error::Singular(_) => 3,
            Error::Precision(_) | Error::IterationLimit { .. } | Error::Stiffness { .. } => 4,
            Error::Consistency(_) | Error::Fit(_) => 5,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
