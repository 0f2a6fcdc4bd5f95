use std::time::Duration;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// `div_exact` was asked to divide by a polynomial that does not divide the dividend.
    #[error("non-exact division: divisor does not divide dividend over the integers")]
    NonExactDivision,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    /// Resource guard: the requested computation would exceed the configured degree cap.
    #[error("degree cap exceeded: degree {degree} > cap {cap}")]
    DegreeCapExceeded { degree: u64, cap: u64 },

    /// Resource guard: subset enumeration is limited to 64 candidate factors.
    #[error("too many cyclotomic factors to enumerate: {count} (limit {limit})")]
    TooManyDivisors { count: usize, limit: usize },

    #[error("time budget of {0:?} exhausted")]
    BudgetExceeded(Duration),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    /// Two closed-form branches that both apply produced different values.
    #[error("formula branches disagree for (p, q, b) = ({p}, {q}, {b}): {detail}")]
    FormulaConflict { p: u64, q: u64, b: u32, detail: String },

    /// A height does not fit the machine-word result type.
    #[error("height does not fit in 64 bits")]
    HeightOverflow,

    #[error("cache conflict for n = {n}: cached {cached}, computed {computed}")]
    CacheConflict { n: u64, cached: u64, computed: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
