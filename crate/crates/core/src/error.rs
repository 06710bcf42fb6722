use std::path::PathBuf;

/// Errors raised anywhere in the pipeline.
///
/// Every message is prefixed with the module that produced it so that the
/// command-line front end can surface it verbatim.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cohort: {0}")]
    Cohort(String),

    #[error("cohort: {path}: row {row}: {msg}")]
    CohortRow { path: PathBuf, row: usize, msg: String },

    #[error("preprocess: {0}")]
    Preprocess(String),

    #[error("simgraph: {0}")]
    Graph(String),

    #[error("sage: {0}")]
    Sage(String),

    #[error("baselines: {0}")]
    Baseline(String),

    #[error("eval: {0}")]
    Eval(String),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// `true` for errors caused by invalid user input (bad config, malformed
    /// files, violated preconditions) as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::CohortRow { .. } | Error::Cohort(_) | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
