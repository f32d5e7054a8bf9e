use thiserror::Error;

/// Errors raised by the solver, the certificate routines and config parsing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("density derivative requested at breakpoint x = {x}")]
    BreakpointDerivative { x: f64 },

    #[error("eta undefined outside the support (x = {x})")]
    OutsideSupport { x: f64 },

    #[error("class densities coincide on the cell [{lo}, {hi}]")]
    DegenerateTie { lo: f64, hi: f64 },

    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),

    #[error("scan window is empty")]
    WindowEmpty,

    #[error("brute-force budget exceeded: {count} states > {limit}")]
    BudgetExceeded { count: u64, limit: u64 },

    #[error("assumptions not met: {0}")]
    AssumptionUnmet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
