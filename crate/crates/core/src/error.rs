use thiserror::Error;

/// Errors raised by network construction, operator assembly and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OsmError {
    /// An input violates a precondition. `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// The closed-form norm bound was invoked outside its hypothesis.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A diagonal block of the transmission operator could not be inverted.
    #[error("singular block at rows {row}..{end}")]
    SingularBlock { row: usize, end: usize },

    /// A banded or dense factorization met a zero pivot.
    #[error("singular system: zero pivot in column {0}")]
    SingularSystem(usize),

    /// The eigenvalue iteration did not converge within its budget.
    /// `estimate` is the power-norm estimate `||T^m||^(1/m)`, which is an
    /// upper bound on the spectral radius but not the radius itself.
    #[error("eigenvalue iteration did not converge for a {size}x{size} matrix (estimate {estimate})")]
    EigenNonConvergence { size: usize, estimate: f64 },

    /// No sign change of the equioscillation residual was found.
    #[error("could not bracket the equioscillation root on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, OsmError>;

pub(crate) fn domain<T>(field: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(OsmError::Domain {
        field,
        reason: reason.into(),
    })
}
