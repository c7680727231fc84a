use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("graph has {edges} edges, exceeding the enumeration cap of {cap}")]
    CapacityExceeded { edges: usize, cap: usize },

    #[error("conditioning event has probability zero given the revealed edges")]
    ConditioningOnNullEvent,

    #[error("coupling constants not applicable: theta + h = {sum} >= 1")]
    NotApplicable { sum: f64 },

    #[error("degenerate threshold: density {delta} <= 1/|V| = {floor}")]
    DegenerateThreshold { delta: f64, floor: f64 },

    #[error("non-monotone estimate detected at p = {p}; retry with more replicas")]
    NonMonotone { p: f64 },

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("unknown operation `{0}`")]
    UnknownOperation(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used in the CLI's error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidIndex(_) => "invalid-index",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NumericFailure(_) => "numeric-failure",
            Error::CapacityExceeded { .. } => "capacity-exceeded",
            Error::ConditioningOnNullEvent => "conditioning-on-null-event",
            Error::NotApplicable { .. } => "not-applicable",
            Error::DegenerateThreshold { .. } => "degenerate-threshold",
            Error::NonMonotone { .. } => "non-monotone-detected",
            Error::InternalInvariant(_) => "internal-invariant-violation",
            Error::UnknownOperation(_) => "unknown-operation",
            Error::UnknownSuite(_) => "unknown-suite",
            Error::Config(_) => "invalid-config",
            Error::Io(_) => "io",
            Error::Json(_) => "invalid-json",
        }
    }
}
