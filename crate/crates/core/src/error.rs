use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument modulus {modulus} exceeds the series limit {limit}")]
    Overflow { modulus: f64, limit: f64 },
    #[error("argument {re} lies on the branch cut and no branch was given")]
    Branch { re: f64 },
    #[error("operation requires the {expected} regime")]
    Regime { expected: &'static str },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("c = {c} is not an eigenvalue (boundary residual {residual:e})")]
    NotAnEigenvalue { c: f64, residual: f64 },
    #[error("correction system is near singular (reciprocal condition {rcond:e})")]
    SingularBumpSystem { rcond: f64 },
    #[error("time stepping blew up at t = {t}")]
    Stability { t: f64 },
    #[error("data preparation check failed: {0}")]
    Preparation(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
