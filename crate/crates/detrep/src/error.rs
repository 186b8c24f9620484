use thiserror::Error;

/// Errors raised by representation construction and system solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {0} is not supported; representations exist for degrees 2-5 only")]
    UnsupportedDegree(usize),

    #[error("input polynomial is zero or numerically degenerate")]
    DegenerateInput,

    #[error("leading coefficient a_n0 is numerically zero; rotate coordinates and retry")]
    NearZeroLeadingCoefficient,

    #[error("reduction residual exceeds tolerance (numerical breakdown); rotate coordinates and retry")]
    ReductionResidual,

    #[error("tangent at (1,0,0) is a coordinate line; rotate coordinates and retry")]
    TangentIsCoordinateLine,

    #[error("(1,0,0) is a singular point of the curve")]
    SingularPoint,

    #[error("conic has full rank 3 and is not decomposable")]
    NotDecomposable,

    #[error("conic is numerically zero")]
    ZeroConic,

    #[error("no admissible ordering of roots for slots 3 and 4; rotate coordinates and retry")]
    NeedsRotation,

    #[error("every construction strategy failed (numerical breakdown)")]
    ConstructionFailed,

    #[error("coordinate-rotation retries exhausted ({0} attempts)")]
    RetriesExhausted(usize),

    #[error(
        "Delta0 is numerically singular: the two-parameter eigenvalue problem is singular \
         (e.g. the two curves share a component). Staircase-type methods for singular \
         problems are not implemented here; perturb the input or remove the common factor."
    )]
    SingularDelta0,

    #[error("projective transform matrix is singular")]
    SingularTransform,

    #[error("dimension mismatch: representation size {rep} vs polynomial degree {degree}")]
    DimensionMismatch { rep: usize, degree: usize },

    #[error("invalid polynomial data: {0}")]
    InvalidInput(String),

    #[error("eigensolver failed (LAPACK info = {0})")]
    EigenFailure(i32),
}

pub type Result<T> = std::result::Result<T, Error>;
