use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid trace {trace} (expected {expected})")]
    InvalidTrace { trace: f64, expected: &'static str },

    #[error("POVM elements do not sum to identity (max deviation {deviation:.3e})")]
    IncompletePovm { deviation: f64 },

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation at {min_weight} discards every ensemble element")]
    EmptyTruncation { min_weight: f64 },

    #[error("states do not commute (max commutator entry {deviation:.3e})")]
    NotCommuting { deviation: f64 },

    #[error("epsilon = {stated} is not a valid certificate (min distance requires epsilon >= {tight})")]
    InvalidCertificate { stated: f64, tight: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid box at {location}: {reason}")]
    InvalidBox { location: String, reason: String },

    #[error("box is signalling: {0}")]
    Signalling(String),

    #[error("strategy enumeration needs {required} entries, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("linear program is infeasible (phase-one residual {residual:.3e})")]
    Infeasible { residual: f64 },

    #[error("linear program is unbounded (entering column {column})")]
    Unbounded { column: usize },

    #[error("simplex iteration budget {budget} exhausted")]
    IterationLimit { budget: usize },

    #[error("vacuous regime: {0}")]
    Vacuous(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
