use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode audio {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("zero-length audio: {0}")]
    ZeroLengthAudio(PathBuf),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("raw annotation out of range: {song_id} has {field} = {value}")]
    AnnotationRange {
        song_id: String,
        field: &'static str,
        value: f64,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("R² undefined: target is constant")]
    R2Undefined,

    #[error("non-finite gradient in {param} at step {step}")]
    NonFiniteGradient { param: String, step: u64 },

    #[error("training diverged at epoch {epoch}, batch {batch}: loss = {loss}")]
    Diverged {
        epoch: usize,
        batch: usize,
        loss: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
