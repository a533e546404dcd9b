use thiserror::Error;

/// Errors raised by the kernel. Every operation is exact, so there is no
/// "numerical" failure mode: each variant names a violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("no substitute given for variable index {0}")]
    MissingSubstitute(usize),
    #[error("points belong to different spaces")]
    SpaceMismatch,
    #[error("functional is zero")]
    ZeroFunctional,
    #[error("object carries no distinguished element")]
    NotSpecial,
    #[error("points do not lie in a common fiber: {0}")]
    FiberMismatch(String),
    #[error("core-dual projections differ")]
    BaseMismatch,
    #[error("malformed constraint: {0}")]
    MalformedConstraint(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("one-form is zero or the base is a point")]
    ZeroForm,
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("polynomial matrix has no polynomial inverse (determinant {0} is not a nonzero constant)")]
    NonPolynomialInverse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(what: impl Into<String>) -> Error {
    Error::DimMismatch(what.into())
}
