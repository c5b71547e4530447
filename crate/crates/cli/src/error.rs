use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at {path}: {message}")]
    Config { path: String, message: String },
    #[error("scenario {id}: {source}")]
    Scenario {
        id: String,
        #[source]
        source: qhe_limits::Error,
    },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}
