use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A violated mesh invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("element {element}: {reason}")]
    Element { element: usize, reason: String },
    #[error("face {face}: {reason}")]
    Face { face: usize, reason: String },
    #[error("element {element}: faces cover {covered} of perimeter {perimeter}")]
    SkeletonPartition { element: usize, covered: f64, perimeter: f64 },
    #[error("element {element}: sum of |F| n_TF has norm {residual:e}")]
    Divergence { element: usize, residual: f64 },
    #[error("element areas sum to {total}, expected 1")]
    Coverage { total: f64 },
    #[error("boundary faces measure {total}, expected 4")]
    BoundaryLength { total: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh validation failed: {0}")]
    Validation(#[from] ValidationError),
    #[error("geometry error on element {element}: {reason}")]
    Geometry { element: usize, reason: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("unsupported request: {0}")]
    Capability(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Newton diverged at p = {p} after {iterations} iterations (residual {residual:e})")]
    Divergence { p: f64, iterations: usize, residual: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
