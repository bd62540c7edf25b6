use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unsupported loss: {0}")]
    UnsupportedLoss(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("non-finite value in layer {layer}: {message}")]
    Numeric { layer: usize, message: String },

    #[error("training diverged at epoch {epoch}, step {step}: {message}")]
    Training {
        epoch: usize,
        step: usize,
        message: String,
    },

    #[error("ingestion error{}{}: {message}", row.map(|r| format!(" at row {r}")).unwrap_or_default(), column.as_ref().map(|c| format!(", column '{c}'")).unwrap_or_default())]
    Ingestion {
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    #[error("audit failed while training the variant without point {removed_id}: {source}")]
    Audit {
        removed_id: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("oracle refused: training set of {size} points exceeds the cap of {cap}")]
    OracleRefused { size: usize, cap: usize },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("config syntax error: {0}")]
    ConfigSyntax(String),

    #[error("config key '{key}': {message}")]
    ConfigSemantic { key: String, message: String },

    #[error("malformed model encoding: {0}")]
    Codec(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
