use thiserror::Error;

/// Errors raised anywhere in the tomography pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("data error: {0}")]
    Data(String),

    #[error("eigensolver did not converge for a {dim}x{dim} matrix after {max_iters} sweeps")]
    EigenNoConvergence { dim: usize, max_iters: usize },

    #[error("iteration diverged at step {iteration}: objective {objective}; lower the step or use step_rule = \"backtracking\"")]
    Diverged { iteration: usize, objective: f64 },

    #[error("residual level {epsilon:e} is infeasible: least-squares floor is {floor:e}")]
    Infeasible { epsilon: f64, floor: f64 },

    #[error("degenerate result: {0}")]
    Degenerate(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
