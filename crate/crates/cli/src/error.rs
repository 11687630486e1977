use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario {origin}: {message}")]
    Config { origin: String, message: String },
    #[error("{0}")]
    Override(String),
    #[error("unknown bundled scenario `{0}`")]
    UnknownBundled(String),
    #[error("duplicate scenario name `{0}`")]
    DuplicateName(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] qmeas_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
