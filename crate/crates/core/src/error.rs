use alloc::string::String;

/// Errors raised by the tensor engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("direction vector y is zero")]
    ZeroDirection,
    #[error("non-finite coordinate in evaluation point")]
    NonFinite,
    #[error("dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },
    #[error("formula only holds in dimension {expected}, got {got}")]
    UnsupportedDimension { expected: usize, got: usize },
    #[error("coordinate arrays have mismatched lengths")]
    DimensionMismatch,
    #[error("invariants are not realizable: {0}")]
    InfeasibleInvariants(&'static str),
    #[error("point lies outside the admissible domain of model `{0}`")]
    OutOfDomain(&'static str),
    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    OrderUnsupported { requested: usize, max: usize },
    #[error("unknown metric model `{0}`")]
    UnknownModel(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: &'static str },
    #[error("fundamental tensor is singular or not positive definite")]
    SingularMetric,
    #[error("sigma_1 = phi - s phi_s - t phi_t vanishes")]
    DegenerateSigma1,
    #[error("mean Cartan torsion vanishes (Riemannian point)")]
    RiemannianPoint,
    #[error("frame {{x, y, a}} is rank deficient")]
    RankDeficientFrame,
    #[error("model depends on the anchor covector or a is nonzero")]
    NotSphericallySymmetric,
    #[error("step size must be positive and finite")]
    InvalidStep,
}

pub type Result<T> = core::result::Result<T, Error>;
