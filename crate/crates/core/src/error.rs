use thiserror::Error;

/// Input that does not describe a proper triangle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("side lengths must be finite and strictly positive, got {0}")]
    NonPositiveSide(f64),
    #[error("not a triangle: sides {0}, {1}, {2} violate the strict triangle inequality")]
    NonTriangle(f64, f64, f64),
}

/// Argument outside the domain of one of the special functions.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{function}: argument {value} outside domain ({detail})")]
pub struct DomainError {
    pub function: &'static str,
    pub value: f64,
    pub detail: &'static str,
}

/// Failure while evaluating the correlation function or a derivative.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("third derivative is singular at r = {r} (active height {height})")]
    SingularPoint { r: f64, height: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not reach tolerance {tolerance:e} within {subdivisions} subdivisions (estimated error {estimate:e})")]
    ToleranceNotReached {
        tolerance: f64,
        estimate: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

/// Crate-wide error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
