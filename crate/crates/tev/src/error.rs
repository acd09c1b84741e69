use std::path::PathBuf;

/// Failures of the driver layer: solver errors plus file and format
/// problems.
#[derive(Debug, thiserror::Error)]
pub enum TevError {
    #[error(transparent)]
    Solver(#[from] tev_core::Error),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("io: csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl TevError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TevError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for configuration and parse problems, 1 for
    /// everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            TevError::Config(_) => 2,
            TevError::Solver(
                tev_core::Error::Config(_)
                | tev_core::Error::InvalidParams { .. }
                | tev_core::Error::Parse { .. }
                | tev_core::Error::Validation(_)
                | tev_core::Error::Shape
                | tev_core::Error::Regime(_),
            ) => 2,
            _ => 1,
        }
    }
}

pub type TevResultOf<T> = std::result::Result<T, TevError>;
