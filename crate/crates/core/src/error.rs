use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tensor is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("linear solve inaccurate: relative residual {residual:e} exceeds {tolerance:e}")]
    InaccurateSolve { residual: f64, tolerance: f64 },

    #[error("point ({x}, {y}) lies outside element {element}")]
    PointOutsideElement { element: usize, x: f64, y: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("time step {step}, iteration {iteration}: {source}")]
    Step {
        step: usize,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
