use thiserror::Error;

/// Errors produced by graph ingestion, evaluation and selection.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(
        "series did not converge after {iterations} iterations (last increment {last_increment:e})"
    )]
    Divergence {
        iterations: usize,
        last_increment: f64,
    },

    #[error("search space of {count} subsets exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("query generation failed: ball union holds {union_size} nodes, {required} required")]
    QueryGeneration { union_size: usize, required: usize },
}

impl Error {
    /// Numerical failures map to a distinct process exit status in the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Divergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
