use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A game, belief or problem failed validation. `field` names the offending input.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("information structure is not Bayes plausible (residual {residual:.3e})")]
    BayesViolation { residual: f64 },

    #[error("support is not affinely independent")]
    NotAffinelyIndependent,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("region of action {action} is degenerate (affine dimension {dimension:?})")]
    DegenerateRegion {
        action: usize,
        dimension: Option<usize>,
    },

    #[error("interval ({a}, {b}] carries no prior mass")]
    EmptyInterval { a: f64, b: f64 },

    #[error("parameter outside its domain: {0}")]
    Domain(String),

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("problem exceeds supported scale: {0}")]
    ScaleExceeded(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
