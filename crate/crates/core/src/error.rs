use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Error, Debug)]
pub enum CoulombError {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: Complex64 },

    #[error("non-finite input to {0}")]
    NonFiniteInput(&'static str),

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("series for {function} did not converge within {terms} terms")]
    Convergence { function: &'static str, terms: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("essential singularity of {0} at 1/eta = 0")]
    EssentialSingularity(&'static str),

    #[error("ODE step failure at rho = {at}: {reason}")]
    StepFailure { at: Complex64, reason: String },

    #[error("integration path passes through rho = 0")]
    PathThroughOrigin,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CoulombError {
    /// Short machine-readable name, printed by the CLI on failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CoulombError::Pole { .. } => "PoleError",
            CoulombError::NonFiniteInput(_) => "NonFiniteInput",
            CoulombError::Overflow(_) => "OverflowError",
            CoulombError::Convergence { .. } => "ConvergenceError",
            CoulombError::Domain(_) => "DomainError",
            CoulombError::EssentialSingularity(_) => "EssentialSingularity",
            CoulombError::StepFailure { .. } => "StepFailure",
            CoulombError::PathThroughOrigin => "PathThroughOrigin",
            CoulombError::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, CoulombError>;

pub(crate) fn ensure_finite(name: &'static str, values: &[Complex64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(CoulombError::NonFiniteInput(name))
    }
}
