use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must satisfy 2 <= n <= {max}, got {got}")]
    InvalidDimension { got: usize, max: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular input at the origin: {0}")]
    Singular(&'static str),

    #[error("quadrature did not converge: estimate {estimate} with error {error_estimate} after {evaluations} evaluations")]
    QuadratureNotConverged {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("step size underflow in mode integration; last good r = {last_r}")]
    StepUnderflow { last_r: f64 },

    #[error("mode integration left the floating-point range near r = {r}")]
    NonFinite { r: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
