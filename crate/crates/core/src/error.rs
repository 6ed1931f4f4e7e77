use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed WAV: {0}")]
    Format(String),

    #[error("unsupported audio encoding: {0}")]
    UnsupportedCodec(String),

    #[error("truncated data: {0}")]
    Truncated(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("frequency {freq} Hz is at or above the Nyquist limit {nyquist} Hz")]
    Aliasing { freq: f64, nyquist: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown subgenre {tag:?} (track {track_id})")]
    UnknownSubgenre { track_id: String, tag: String },

    #[error("duplicate track id {0:?}")]
    DuplicateTrack(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("cannot compute metrics on an empty evaluation set")]
    EmptyEvaluation,

    #[error("sample size {n} outside supported range {min}..={max}")]
    Range { n: usize, min: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
