use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("mode error at {line}:{column}: the universe constant `1` is not available in set mode")]
    UniverseInSetMode { line: usize, column: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown variable `{0}` (not among the parameters)")]
    UnknownVariable(String),
    #[error("presentation mismatch: expected {expected} element, found {found}")]
    PresentationMismatch { expected: String, found: String },
    #[error("theory mode mismatch between models")]
    ModeMismatch,
    #[error("malformed split: {0}")]
    MalformedSplit(String),
    #[error("bad element descriptor: {0}")]
    Descriptor(String),
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Errors signalling that a hard resource cap was hit rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
