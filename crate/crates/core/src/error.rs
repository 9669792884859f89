use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("missing entry: {0}")]
    MissingEntry(String),

    #[error("conflicting supplier for item {item}: {first} vs {second}")]
    SupplierConflict {
        item: String,
        first: String,
        second: String,
    },

    #[error("{} item(s) without a supplier: {}", .0.len(), preview(.0))]
    MissingSupplier(Vec<String>),

    #[error("format error: {0}")]
    Format(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("network construction error: {0}")]
    Construction(String),

    #[error("internal logic error: {0}")]
    InternalLogic(String),

    #[error("max-flow solver exceeded {limit} operations")]
    SolverStuck { limit: u64 },

    #[error("re-ranking loop exceeded {limit} iterations")]
    LoopStuck { limit: usize },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("i/o error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InternalLogic(_) | Error::SolverStuck { .. } | Error::LoopStuck { .. }
        )
    }

    /// Errors caused by how the tool was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::Configuration(_))
    }
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut out = ids.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        out.push_str(", ...");
    }
    out
}
