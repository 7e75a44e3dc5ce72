use alloc::string::String;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid cat matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({q}, {p}) lies outside the unit torus")]
    OutOfDomain { q: f64, p: f64 },
    #[error("cat matrix is not quantizable: {0}")]
    NotQuantizable(String),
    #[error("symbolic dynamics unavailable for this model")]
    SymbolicUnavailable,
    #[error("operation unsupported for this model: {0}")]
    Unsupported(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("resource cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: u64, cap: u64 },
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("maslov calibration failed: {0}")]
    Calibration(String),
    #[error("register error: {0}")]
    Register(String),
    #[error("oracle is not reversible: {0}")]
    Irreversible(String),
    #[error("target subspace has zero overlap with the state")]
    EmptyTarget,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("checkpoint {step} failed: {detail}")]
    Checkpoint { step: String, detail: String },
    #[error("no consistent period in phase samples: {0}")]
    PeriodNotFound(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("eigendecomposition did not converge")]
    NoConvergence,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    /// True for errors that signal an exceeded size or work budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::CapExceeded { .. } | Error::Overflow(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
