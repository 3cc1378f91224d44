use thiserror::Error;

/// Errors raised across the crate.
///
/// Every variant maps onto one of the CLI exit codes through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial is not squarefree")]
    NonSquarefreeInput,
    #[error("minimal polynomial is reducible over Q")]
    ReducibleMinpoly,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("linear forms are not of full rank")]
    NotFullRank,
    #[error("form has {m} variables but degree {n}; normal form needs m = n")]
    WrongVariableCount { m: usize, n: usize },
    #[error("field is not totally real")]
    NotTotallyReal,
    #[error("quadratic form {0} is not positive definite")]
    NotPositiveDefinite(usize),
    #[error("element is not totally positive")]
    NotTotallyPositive,
    #[error("degree {0} exceeds the supported maximum of 8")]
    DegreeTooLarge(usize),
    #[error("torus chart does not match the element: {0}")]
    ChartMismatch(String),
    #[error("lattice basis is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("element is not a norm-one unit: {0}")]
    NotAUnit(String),
    #[error("generators do not commute")]
    NonCommuting,
    #[error("unit-span algebra is not semisimple")]
    NonSemisimple,
    #[error("no primitive element found up to coefficient height {0}")]
    PrimitiveElementNotFound(i64),
    #[error("parameter must be positive: {0}")]
    NonPositiveParameter(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("point budget exceeded: {needed} points requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("precision floor reached: {0}")]
    PrecisionFloorHit(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

impl Error {
    /// CLI exit code: 2 precondition/input problems, 3 budget, 4 precision.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 3,
            Error::PrecisionFloorHit(_) | Error::IllConditioned(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
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
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
