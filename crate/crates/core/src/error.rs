use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid pulse parameters: {0}")]
    InvalidParams(String),

    /// Fewer than 20 samples per period of the fastest oscillation.
    #[error("grid of {grid} intervals is too coarse; at least {required} are needed")]
    GridTooCoarse { grid: usize, required: usize },

    #[error("|Im nu|·tau = {im_nu_tau} exceeds the overflow guard of 50")]
    Overflow { im_nu_tau: f64 },

    #[error("closed-form theta requires a Gaussian envelope")]
    WrongEnvelope,

    #[error("step limit of {steps} exceeded at t = {t}")]
    StepLimitExceeded { steps: usize, t: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("norm drift {drift:e} at t = {t}")]
    NormDrift { drift: f64, t: f64 },

    #[error("lambda iteration did not converge after {iterations} iterations (residual {residual:e}, best {lambda})")]
    NotConverged {
        lambda: C64,
        residual: f64,
        iterations: usize,
    },

    #[error("sequence diverged at order {order}")]
    Diverged { order: usize },

    #[error("pulse area approaches an odd multiple of pi/2 at t = {t}")]
    NearSingularArea { t: f64 },

    #[error("trajectories are sampled on different grids")]
    GridMismatch,

    #[error("reference trajectory has zero norm")]
    ZeroNorm,
}
