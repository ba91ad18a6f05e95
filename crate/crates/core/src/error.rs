use thiserror::Error;

/// Errors raised anywhere in the soliton pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}) within {budget} subdivisions")]
    NonConvergence { tol: f64, estimate: f64, budget: usize },

    #[error("ODE step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("ODE step budget of {steps} exhausted at t = {t}")]
    StepBudget { t: f64, steps: usize },

    /// A requested time lies on, or too close to, a zero of the eigenfunction.
    #[error("singularity at t = {singular_time} (offending sample t = {sample})")]
    Singularity { singular_time: f64, sample: f64 },

    #[error("elliptic modulus m = {0} not supported here")]
    Modulus(f64),

    #[error("soliton width undefined for m = 0 (tau0^2 = 0)")]
    UndefinedWidth,

    #[error("grid resolution: {0}")]
    Resolution(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
