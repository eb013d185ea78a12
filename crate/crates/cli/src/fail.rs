use std::fmt;
use std::process::ExitCode;

use central_spin::Error;

/// A failed run, classified by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad scenario file or flags (exit 2).
    Config(String),
    /// Bath too large for exact diagonalization (exit 3).
    Capacity(String),
    /// A numerical check did not pass (exit 4).
    Numerical(String),
    /// Anything else, e.g. I/O (exit 1).
    Other(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Config(_) => 2,
            Failure::Capacity(_) => 3,
            Failure::Numerical(_) => 4,
            Failure::Other(_) => 1,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Capacity(m) => write!(f, "capacity exceeded: {m}"),
            Failure::Numerical(m) => write!(f, "numerical validation failed: {m}"),
            Failure::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Config(e.to_string()),
            Error::Capacity { .. } => Failure::Capacity(e.to_string()),
            Error::Validation(_) | Error::NoRevival(_) | Error::Precondition(_) => {
                Failure::Numerical(e.to_string())
            }
            Error::Cache(_) | Error::Io(_) => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Other(e.to_string())
    }
}
