use thiserror::Error;

use crate::Precision;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("|q| must be below 1, got {0}")]
    InvalidQ(f64),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("eigen-index must be at least 1")]
    ZeroIndex,

    #[error("degree {n} exceeds the double-precision cap of {cap}")]
    DegreeTooLarge { n: usize, cap: usize },

    #[error("x = {0} lies outside [0, 1]")]
    OutOfDomain(f64),

    #[error(
        "cancellation ratio {ratio:.3e} exceeds the {precision} budget of {limit:.1e}; \
         use extended precision or a smaller index"
    )]
    PrecisionBudget {
        ratio: f64,
        limit: f64,
        precision: Precision,
    },

    #[error("adaptive quadrature on [{a}, {b}] exhausted its budget of {budget} panels")]
    QuadratureBudget { a: f64, b: f64, budget: usize },

    #[error("invalid quadrature specification: {0}")]
    InvalidQuadrature(String),

    #[error("dense eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid of {n} nodes exceeds the dense-storage limit of {max}")]
    GridTooLarge { n: usize, max: usize },

    #[error("grid is not symmetric under x -> 1 - x")]
    AsymmetricGrid,

    #[error("invalid substitution map: {0}")]
    InvalidMap(String),

    #[error("root certification failed: {0}")]
    RootCertification(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
