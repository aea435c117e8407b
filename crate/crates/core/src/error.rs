use thiserror::Error;

/// Errors raised by body construction, profiles, solvers and symmetrization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("origin is not in the interior: {0}")]
    OriginNotInterior(String),
    #[error("degenerate polytope: {0}")]
    Degenerate(String),
    #[error("dimension {dim} is not supported for {what}")]
    DimensionUnsupported { dim: usize, what: &'static str },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linear map is singular (|det| = {0:e})")]
    SingularMap(f64),
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("rearrangement increases at t = {t}: {prev} -> {next}")]
    MonotonicityViolation { t: f64, prev: f64, next: f64 },
    #[error("lambda must be positive, got {0}")]
    NonpositiveLambda(f64),
    #[error("norm bracket failure: {0}")]
    BracketFailure(String),
    #[error("point lies on the relative boundary of the projection: {0}")]
    BoundaryPoint(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("graph functions disagree: chord {chord} vs support minimization {dual}")]
    GraphMismatch { chord: f64, dual: f64 },
    #[error("support function not even: h(u) = {plus}, h(-u) = {minus}")]
    SymmetryViolation { plus: f64, minus: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
