use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on caller-supplied data was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A moment matrix is not positive definite, so no Christoffel factor exists.
    ///
    /// Typical causes: fewer samples than basis elements, a measure supported on
    /// a lower-dimensional variety, or a degree too high for the data.
    #[error(
        "singular moment matrix over variables {vars:?}: {detail}; \
         lower the degree, add samples, or raise the jitter"
    )]
    SingularMomentMatrix { vars: Vec<usize>, detail: String },

    /// Moment accumulation left the representable range.
    #[error("numeric overflow: {0}; consider rescaling the data to [-1, 1]")]
    NumericOverflow(String),

    /// An operation that requires a chordal graph received a non-chordal one.
    #[error("graph is not chordal")]
    NotChordal,

    /// A text input (graph file, CSV, grid spec) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A model file failed structural or numerical validation on load.
    #[error("model file invalid: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line tool: 2 for input errors,
    /// 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularMomentMatrix { .. } | Error::NumericOverflow(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
