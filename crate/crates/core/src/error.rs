use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variants group into the three process exit classes used by the command
/// line runner (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("index error: {what} {index} out of range for {len}")]
    Index {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("schema error: missing required column(s): {}", missing.join(", "))]
    Schema { missing: Vec<String> },

    #[error("state error: {0}")]
    State(String),

    #[error("training error at epoch {epoch}: {reason}")]
    Training { epoch: usize, reason: String },

    #[error("model kind error: expected {expected}, checkpoint holds {found}")]
    Kind { expected: String, found: String },

    #[error("incompatible file version: found {found}, supported {supported}")]
    Version { found: u32, supported: u32 },

    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("TOML error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// 1 for configuration problems, 2 for data problems, 3 for training failures.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_)
            | Error::Index { .. }
            | Error::State(_)
            | Error::Kind { .. }
            | Error::Version { .. }
            | Error::Toml(_) => 1,
            Error::Shape(_)
            | Error::Data(_)
            | Error::Schema { .. }
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::Training { .. } => 3,
            Error::Stage { .. } => unreachable!("root() strips stage wrappers"),
        }
    }
}

pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.into().in_stage(stage))
    }
}
