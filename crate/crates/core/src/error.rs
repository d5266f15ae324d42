use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input that violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A configuration file that is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("failed to parse {what}: {source}")]
    Parse {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Training data with a single class (or none).
    #[error("degenerate training data: {0}")]
    DegenerateData(String),

    /// A statistic that has no value for the given input.
    #[error("{0} is undefined for this input")]
    Undefined(&'static str),

    #[error("no template in the bank matches proposition `{0}`")]
    TemplateCoverage(String),

    #[error("cannot realize tree: {0}")]
    Realization(String),

    /// Wraps a generation error with the feature it came from.
    #[error("feature `{token}`: {source}")]
    Feature {
        token: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_feature(self, token: &str) -> Error {
        Error::Feature {
            token: token.to_string(),
            source: Box::new(self),
        }
    }
}
