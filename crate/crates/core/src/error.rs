use thiserror::Error;

use crate::locator::Edge;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid rectangle: {0}")]
    InvalidBox(String),
    #[error("s = 1 is a pole of the function")]
    PoleAtOne,
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("outside the domain of the method: {0}")]
    DomainError(String),
    #[error("exponent overflow: {0}")]
    OverflowGuard(String),
    #[error("finite-difference stencil leaves (0, 1] at lambda = {0}")]
    EdgeOfDomain(f64),
    #[error("|f| = {modulus:e} on the {edge:?} edge of the contour")]
    ZeroOnBoundary { edge: Edge, modulus: f64 },
    #[error("winding number {0} is not close to an integer")]
    NonIntegerWinding(f64),
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("iterate left the search disc around the seed")]
    Escaped,
    #[error("empty zero list")]
    EmptyList,
    #[error("multiplicity sum {found} does not match winding count {expected}")]
    CountMismatch { expected: usize, found: usize },
    #[error("singular Jacobian near lambda = {lambda}")]
    SingularJacobian { lambda: f64 },
    #[error("step size underflow at lambda = {lambda}")]
    StepUnderflow { lambda: f64 },
    #[error("mirror of {0} lies outside the scanned box")]
    IncompleteBox(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("malformed file: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
