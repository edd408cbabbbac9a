use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data failed schema or invariant validation.
    #[error("validation: {0}")]
    Validation(String),

    /// A generation profile cannot be satisfied by the template grammars.
    #[error("unsatisfiable profile: {0}")]
    UnsatisfiableProfile(String),

    /// A serialized record could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A binary container had the wrong magic, version, or layout.
    #[error("format error: {0}")]
    Format(String),

    /// A label, event, or action was not found in its registry.
    #[error("unknown {kind} {name:?}; registry: [{registry}]")]
    UnknownName {
        kind: &'static str,
        name: String,
        registry: String,
    },

    /// An operation was called on a model variant that does not support it.
    #[error("unsupported by variant: {0}")]
    Unsupported(String),

    /// Numeric shapes did not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Iterative fitting failed to reach its tolerance.
    #[error("calibration did not converge: {0}")]
    CalibrationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn unknown_name(kind: &'static str, name: &str, registry: &[String]) -> Self {
        Error::UnknownName {
            kind,
            name: name.to_string(),
            registry: registry.join(", "),
        }
    }
}
