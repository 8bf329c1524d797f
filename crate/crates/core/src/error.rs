use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("division by zero: Y'({x}) = 0")]
    DivisionByZero { x: f64 },

    #[error("singular point at x = {x}")]
    SingularPoint { x: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {error:e})")]
    QuadratureNonConvergence { a: f64, b: f64, error: f64 },

    #[error("one-sided limit did not converge (last differences {0:?})")]
    NonConvergentLimit(Vec<f64>),

    #[error("truncation tail {tail:e} exceeds tolerance {tolerance:e}")]
    TruncationTail { tail: f64, tolerance: f64 },

    #[error("step size underflow after {steps} steps")]
    StepSizeUnderflow { steps: usize },

    #[error("grid too coarse: need at least {needed} points per axis, got {got}")]
    GridTooCoarse { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
