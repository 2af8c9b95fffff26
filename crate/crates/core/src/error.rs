use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (non-finite values, shape mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A singular kernel was evaluated at coincident particles.
    #[error("singular interaction between particles {i} and {j}{}", at_time(*.t))]
    Singularity { i: usize, j: usize, t: Option<f64> },

    #[error("config error: {0}")]
    Config(String),

    #[error("line {line}: key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("gamma = {gamma}, replica {replica}: {source}")]
    Simulation {
        gamma: f64,
        replica: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

fn at_time(t: Option<f64>) -> String {
    match t {
        Some(t) => format!(" at t = {t}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input (configs, sample files) rather than by a run.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Domain(_) => true,
            Error::Simulation { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
