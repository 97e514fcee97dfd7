use thiserror::Error;

pub type Result<T> = std::result::Result<T, CampError>;

/// Crate-wide error type. Validation problems (bad data, broken invariants,
/// bad config) are kept apart from I/O so callers can map them to distinct
/// exit codes.
#[derive(Debug, Error)]
pub enum CampError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed input row; carries the 1-based line number when known.
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    /// A domain invariant or precondition does not hold.
    #[error("{0}")]
    Validation(String),
}

impl CampError {
    pub fn parse(line: u64, msg: impl Into<String>) -> Self {
        CampError::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CampError::Validation(msg.into())
    }

    /// Process exit code: 2 for validation failures, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CampError::Io(_) => 3,
            CampError::Json(e) if e.is_io() => 3,
            CampError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(_) => 3,
                _ => 2,
            },
            _ => 2,
        }
    }
}
