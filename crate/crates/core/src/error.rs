use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular system: {0}")]
    Singular(String),

    /// The fixed-point solver ran out of budget. For `λ > 0` this is a bug signal.
    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("variance amplification is near singular (1 - alpha = {one_minus_alpha:e})")]
    NearSingularVariance { one_minus_alpha: f64 },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}

macro_rules! mismatch {
    ($($arg:tt)*) => {
        $crate::error::Error::DimensionMismatch(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid;
pub(crate) use mismatch;
