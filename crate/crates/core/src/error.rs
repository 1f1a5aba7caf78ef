use thiserror::Error;

/// Failures raised by the lattice, fan, divisor and endomorphism routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a finite-index sublattice")]
    NotFiniteIndex,
    #[error("ray not primitive: {0}")]
    RayNotPrimitive(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("non-simplicial cone {0}")]
    NonSimplicial(String),
    #[error("overlapping cones {0} and {1}")]
    OverlappingCones(String, String),
    #[error("not complete")]
    NotComplete,
    #[error("not smooth")]
    NotSmooth,
    #[error("torsion in the class group (invariant factor {0})")]
    Torsion(String),
    #[error("empty ample cone: the fan is not certified projective")]
    EmptyAmpleCone,
    #[error("not ray-compatible: {0}")]
    NotRayCompatible(String),
    #[error("not cone-compatible: {0}")]
    NotConeCompatible(String),
    #[error("not finite: the lattice map is singular")]
    NotFinite,
    #[error("f* not injective on Pic")]
    PullbackNotInjective,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grading incompatibility: {0}")]
    GradingIncompatible(String),
    #[error("shift mismatch: {0}")]
    ShiftMismatch(String),
    #[error("rank bookkeeping failed: {0}")]
    RankBookkeeping(String),
}

pub type Result<T> = std::result::Result<T, Error>;
