use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} out of range (supported: 1..=30)")]
    Dimension(u32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("vertex bits {bits:#b} do not fit in dimension {dim}")]
    VertexOutOfRange { bits: u32, dim: u32 },
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(String, String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("incomplete model: variable {0} unassigned")]
    IncompleteModel(u32),
    #[error("model violates clause {0}")]
    ModelCheck(usize),
    #[error("decoded witness reaches {got}, below the encoded count {want}")]
    Witness { want: i64, got: i64 },
    #[error("solver exited with unexpected status {0:?}")]
    UnknownExit(Option<i32>),
    #[error("solver could not be started ({command}): {source}")]
    SolverSpawn {
        command: String,
        #[source]
        source: io::Error,
    },
    #[error("exhaustive enumeration at n = {0} requires the long-run flag")]
    TooLarge(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
