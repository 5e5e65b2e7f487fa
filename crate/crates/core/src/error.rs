use thiserror::Error;

/// Errors produced by instance ingestion, solvers and pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("instance has no edges")]
    EmptyInstance,

    #[error("unrecognized instance format: {0}")]
    Format(String),

    #[error("unknown identifier {kind} '{name}'")]
    UnknownIdentifier { kind: &'static str, name: String },

    /// The enumeration threshold tripped; the caller must switch to the
    /// hard-instance pipeline.
    #[error("instance is hard: more than {threshold} maximal bicliques")]
    InstanceHard { threshold: u64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
