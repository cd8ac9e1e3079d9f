use thiserror::Error;

/// Errors produced by the geometry and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (eigenvalue ratio {0:e})")]
    NotPositiveDefinite(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("degenerate simplex (|det| = {0:e})")]
    DegenerateSimplex(f64),
    #[error("point lies outside the projection of the body")]
    OutsideProjection,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("halfspace system is unbounded or empty: {0}")]
    UnboundedOrEmpty(String),
    #[error("body is not isotropic (centroid residual {centroid:e}, covariance residual {covariance:e})")]
    NotIsotropic { centroid: f64, covariance: f64 },
    #[error("hinged body is unbounded")]
    UnboundedResult,
    #[error("degenerate result: {0}")]
    DegenerateResult(String),
    #[error("ridge and origin do not span a hyperplane")]
    DegenerateHyperplane,
    #[error("vertex set {0:?} is not a ridge shared by exactly two facets")]
    NotARidge(Vec<usize>),
    #[error("body is not symmetric about the hyperplane (defect {0:e})")]
    NotSymmetricAboutHyperplane(f64),
    #[error("projection onto the hyperplane has {0} vertices, not a simplex")]
    ProjectionNotSimplex(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// True for failures caused by degenerate or unbounded numerics rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::NotSymmetric(_)
                | Error::NotPositiveDefinite(_)
                | Error::DegenerateSimplex(_)
                | Error::OutsideProjection
                | Error::DegenerateInput(_)
                | Error::UnboundedOrEmpty(_)
                | Error::NotIsotropic { .. }
                | Error::UnboundedResult
                | Error::DegenerateResult(_)
                | Error::DegenerateHyperplane
                | Error::NotSymmetricAboutHyperplane(_)
                | Error::ProjectionNotSimplex(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
