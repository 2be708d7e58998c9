use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point is not on the submanifold (membership residual {residual:?})")]
    NotOnManifold { residual: f64 },

    #[error("vector is not tangent at the base point (residual {residual:?})")]
    NotTangent { residual: f64 },

    #[error("tangent vector is based at a different point than the induced structure")]
    BaseMismatch,

    #[error("structures differ in codimension ({lhs} vs {rhs})")]
    CodimMismatch { lhs: usize, rhs: usize },

    #[error("inner product of spheres is not nested in the outer sphere: r^2 + r3^2 = {inner_sq}, R^2 = {outer_sq}")]
    NestingViolated { inner_sq: f64, outer_sq: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("closed form requires all z-block signs equal")]
    MixedSigns,

    #[error("operation requires an almost product structure (epsilon = +1)")]
    RequiresProductStructure,
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
