use crate::exactmath::ExactMathError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("infeasible")]
    Infeasible,
    #[error("no CAEI solution exists")]
    NoCaei,
    #[error("Eisenberg-Gale solver did not converge after {iterations} iterations (KKT residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("oracle guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    ExactMath(#[from] ExactMathError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
