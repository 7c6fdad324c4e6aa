use thiserror::Error;

/// Errors surfaced by the numerical layers and the command-line runner.
#[derive(Debug, Error)]
pub enum Error {
    /// An input file does not match its schema; `key` names the offending field.
    #[error("schema error at `{key}`: {msg}")]
    Schema { key: String, msg: String },

    /// A caller-side precondition failed (grid sizes, sample counts, domains).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A query point lies outside the region where the operation is reliable.
    #[error("point outside the admissible domain: {0}")]
    Domain(String),

    /// The numerics broke down (singular system, non-finite output, no convergence).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// Process exit status used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. } | Error::Io(_) => 1,
            Error::Precondition(_) | Error::Domain(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
