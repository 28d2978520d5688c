use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fairfront_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row}, column {column:?}: {message}")]
    CsvParse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("artifact {path}: {message}")]
    Artifact { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn artifact(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Artifact {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 configuration, 2 dataset, 3 run artifacts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Core(e) => match e {
                fairfront_core::Error::InvalidConfig(_)
                | fairfront_core::Error::InvalidArchitecture(_) => 1,
                _ => 2,
            },
            Error::Io { .. } | Error::CsvParse { .. } | Error::Dataset(_) => 2,
            Error::Artifact { .. } => 3,
        }
    }
}
