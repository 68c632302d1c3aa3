use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A pivot fell below the relative threshold while solving the
    /// Diophantine system; with Assumption-1-style boxes this indicates a
    /// configuration error (loss of coprimeness margin), not a runtime
    /// state to recover from.
    #[error("singular Sylvester system: {0}")]
    SingularSylvester(String),

    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("target polynomial is not Schur stable")]
    UnstableTarget,

    #[error("estimated numerator has a zero at z = 1 (|B(1)| = {0:e})")]
    ZeroAtOne(f64),

    #[error("operation requires the standard controller mode")]
    ModeMismatch,

    #[error("insufficient history: need {need} samples, have {have}")]
    InsufficientHistory { need: usize, have: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("envelope fit requires a nonzero initial state")]
    ZeroInitialState,

    #[error("sigma {sigma} must exceed the target spectral radius {lambda_lower}")]
    SigmaTooSmall { sigma: f64, lambda_lower: f64 },

    #[error("invalid config: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
