use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("instance not in space: {0:?}")]
    UnknownInstance(String),

    #[error("empty class")]
    EmptyClass,

    #[error("not realizable: {0}")]
    NotRealizable(String),

    #[error("class too shallow: need Littlestone dimension {required}, have {actual}")]
    ClassTooShallow { required: u32, actual: u32 },

    #[error("query budget violated: {0}")]
    BudgetExceeded(String),

    #[error("horizon mismatch: stream {stream}, trace {trace}")]
    HorizonMismatch { stream: f64, trace: f64 },

    #[error("not a self-revealing stream: {0}")]
    MalformedPayload(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Realizability failures are contract violations discovered while running,
    /// everything else is bad input.
    pub fn is_runtime_violation(&self) -> bool {
        matches!(self, Error::NotRealizable(_))
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
