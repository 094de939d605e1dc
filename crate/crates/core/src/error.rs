use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {msg}")]
    Param { name: String, msg: String },

    #[error("invalid input: {0}")]
    Input(String),

    /// `1 - B'(u)/theta^2` vanished or turned negative while bounding speeds.
    #[error("degenerate speed bound at u = {u}: 1 - B'/theta^2 = {denom:e}; use a larger theta")]
    Degenerate { u: f64, denom: f64 },

    #[error("non-finite state after outer step {step}")]
    NonFinite { step: usize },

    #[error("invalid tableau: {0}")]
    Tableau(String),

    #[error("step budget exceeded: {steps} steps requested, limit {limit}")]
    StepBudget { steps: u64, limit: u64 },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{0}` has no exact solution")]
    NoExact(String),

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(name: &str, msg: impl Into<String>) -> Self {
        Error::Param { name: name.to_string(), msg: msg.into() }
    }
}
