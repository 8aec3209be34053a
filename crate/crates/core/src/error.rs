use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty herd")]
    EmptyHerd,
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("no neighbours")]
    NoNeighbours,
    #[error("sheep coincides with GCM")]
    SheepAtCentre,
    #[error("empty trace")]
    EmptyTrace,
    #[error("empty sample")]
    EmptySample,
    #[error("objective length mismatch: {0} vs {1}")]
    ObjectiveLength(usize, usize),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("parse error in {what}: {msg}")]
    Parse { what: String, msg: String },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(what: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { what: what.into(), msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. })
    }
}
