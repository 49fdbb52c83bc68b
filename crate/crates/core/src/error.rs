use thiserror::Error;

/// Knot-vector validation failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("knot vector needs at least two entries, got {0}")]
    TooShort(usize),
    #[error("knot vector must start at 0, starts at {0}")]
    StartNotZero(usize),
    #[error("knot vector must end at n = {expected}, ends at {found}")]
    EndMismatch { expected: usize, found: usize },
    #[error("knot vector decreases at position {index} ({prev} > {next})")]
    NonMonotone { index: usize, prev: usize, next: usize },
    #[error("piece ending at position {index} has {gap} points, needs at least {min}")]
    GapTooSmall { index: usize, gap: usize, min: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid knots: {0}")]
    Knots(#[from] KnotError),
    #[error("segment of length {len} cannot identify a degree-{degree} polynomial")]
    InfeasibleSegment { len: usize, degree: usize },
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error("enumeration budget exceeded: {count} configurations, budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("active-set solver did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("signal is not a member of the requested class: {0}")]
    NotAMember(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: index {found} breaks the contiguous sequence (expected {expected})")]
    NonContiguousIndex {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("input contains no values")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            _ => 1,
        }
    }
}
