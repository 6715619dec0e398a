use thiserror::Error;

/// Every failure carries one of a fixed set of machine-readable codes so the
/// command-line front-end can surface it without string matching.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample is not realizable by the class")]
    Unrealizable,
    #[error("points are not linearly separable")]
    NotSeparable,
    #[error("no hypothesis agrees with the majority vote on the agreement region at k = {k}")]
    NoProjection { k: usize },
    #[error("reconstruction needs a domain point after index {point}, which does not exist")]
    Unrepresentable { point: usize },
    #[error("search cap exceeded: {what} is {actual}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Unrealizable => "UNREALIZABLE",
            Error::NotSeparable => "NOT_SEPARABLE",
            Error::NoProjection { .. } => "NO_PROJECTION",
            Error::Unrepresentable { .. } => "UNREPRESENTABLE",
            Error::CapExceeded { .. } => "CAP_EXCEEDED",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::Precondition(_) => "PRECONDITION",
            Error::Trial { source, .. } => source.code(),
            Error::Io(_) => "IO",
        }
    }

    /// The innermost error, looking through trial wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit status: 2 for validation problems, 3 for violated
    /// mathematical preconditions.
    pub fn exit_status(&self) -> i32 {
        match self.root() {
            Error::InvalidInput(_) | Error::Io(_) | Error::CapExceeded { .. } => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}
