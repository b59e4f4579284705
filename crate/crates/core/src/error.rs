use thiserror::Error;

/// Errors raised across the measure, geometry, transport, planner and audit layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("total weight {total} is not within 1e-9 of 1")]
    NotNormalized { total: f64 },

    #[error("negative weight {value} at position {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("fiber has {found} points, expected {expected}")]
    FiberSizeMismatch { expected: usize, found: usize },

    #[error("no geodesics in space {0}")]
    NoGeodesic(String),

    #[error("path parameter {0} outside [0, 1]")]
    OutOfDomain(f64),

    #[error("paths do not meet: end/start gap {gap}")]
    EndpointMismatch { gap: f64 },

    #[error("invalid point for {space}: {reason}")]
    InvalidPoint { space: String, reason: String },

    #[error("support of size {size} exceeds the limit {limit}")]
    SupportTooLarge { size: usize, limit: usize },

    #[error("partition of unity sums to {sum}, not 1")]
    PartitionNotUnity { sum: f64 },

    #[error("rule {rule} has positive bump {bump} outside its domain")]
    RuleOutsideDomain { rule: usize, bump: f64 },

    #[error("basepoint mismatch: projected basepoint is {gap} away from the requested one")]
    BasepointMismatch { gap: f64 },

    #[error("planner is not equivariant: deviation {deviation} for deck element {element}")]
    EquivarianceViolation { element: usize, deviation: f64 },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("element has infinite order")]
    InfiniteOrder,

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("unknown planner `{0}`")]
    UnknownPlanner(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid planner parameter: {0}")]
    InvalidParameter(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
