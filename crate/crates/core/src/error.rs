use thiserror::Error;

/// Why a strict realization has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibilityHint {
    /// The requested degree changes sum to an odd number, so no edge set can produce them.
    OddParity { sum: i64 },
    /// A vertex would leave the `[0, n-1]` degree range.
    DegreeOutOfRange { vertex: usize, target: i64 },
    /// A vertex needs more additions or deletions than its cap allows.
    CapTooSmall { vertex: usize, change: i64, cap: usize },
    /// No certificate beyond the solver exhausting its search.
    Exhausted,
}

impl std::fmt::Display for InfeasibilityHint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfeasibilityHint::OddParity { sum } => {
                write!(f, "odd parity: degree changes sum to {sum}")
            }
            InfeasibilityHint::DegreeOutOfRange { vertex, target } => {
                write!(f, "vertex {vertex} would need degree {target}")
            }
            InfeasibilityHint::CapTooSmall { vertex, change, cap } => {
                write!(f, "vertex {vertex} needs a change of {change} but its cap is {cap}")
            }
            InfeasibilityHint::Exhausted => write!(f, "no edit set satisfies every vertex"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid edit plan: {0}")]
    InvalidPlan(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("realization infeasible ({0})")]
    Infeasible(InfeasibilityHint),

    #[error("solver stopped at its limit (best bound {bound}, incumbent {incumbent:?})")]
    Timeout { bound: f64, incumbent: Option<f64> },

    #[error("malformed model: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
