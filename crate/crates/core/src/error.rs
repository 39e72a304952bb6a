use std::path::PathBuf;

use crate::lp::LpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("wavelength grid mismatch: {0}")]
    Grid(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate illuminant: y-bar weighted sum is {0}")]
    DegenerateIlluminant(f64),

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("linear program did not reach optimality: {0:?}")]
    Solver(LpStatus),

    #[error("{failed} of {total} probes failed, above the 1% limit")]
    Atlas { failed: usize, total: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
