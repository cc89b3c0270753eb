use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient samples: {needed} required, {got} available")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quantile solver did not converge within {iterations} iterations (tau = {tau})")]
    SolverFailure { tau: f64, iterations: usize },

    #[error("budget {budget} cannot pay for the {rounds} initial exploration rounds at {c_epr} each")]
    BudgetExhausted { budget: f64, rounds: usize, c_epr: f64 },

    #[error("infeasible exploitation: remaining budget {remaining} buys no sample of {subset} (cost {cost})")]
    InfeasibleExploitation {
        subset: String,
        remaining: f64,
        cost: f64,
    },

    #[error("infeasible run: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid feature expansion: {0}")]
    InvalidExpansion(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("sample table is empty")]
    EmptyTable,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
