use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] bhs_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed trace at line {line}: {reason}")]
    MalformedTrace { line: usize, reason: String },
    #[error("malformed schedule at line {line}: {reason}")]
    MalformedSchedule { line: usize, reason: String },
    #[error("need at least 3 data points, got {points}")]
    InsufficientData { points: usize },
    #[error("value {value} is not positive")]
    NonPositiveValue { value: f64 },
}

impl HarnessError {
    pub fn usage(msg: impl Into<String>) -> Self {
        HarnessError::Usage(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
