use thiserror::Error;

/// Errors raised by space construction, projector plans and studies.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported quadrature degree {0} (maximum is {max})", max = crate::refsimplex::MAX_QUADRATURE_DEGREE)]
    UnsupportedDegree(usize),
    #[error("invalid sub-simplex: {0}")]
    InvalidSubSimplex(String),
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),
    #[error("negative polynomial degree {0}")]
    NegativeDegree(i64),
    #[error("image does not embed in the target space (residual {residual:.3e})")]
    NotInTarget { residual: f64 },
    #[error("singular system in {context} (smallest singular value {sigma:.3e})")]
    Singular { context: String, sigma: f64 },
    #[error("non-finite field sample at ({x}, {y}, {z})")]
    NonFinite { x: f64, y: f64, z: f64 },
    #[error("residual {residual:.3e} exceeds tolerance {tol:.1e} in {context}")]
    Residual { context: String, residual: f64, tol: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid fractional order s = {0}")]
    InvalidOrder(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
