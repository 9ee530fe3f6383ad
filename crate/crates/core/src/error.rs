use thiserror::Error;

/// Errors raised by the numerical kernels and path constructions.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not skew-hermitian (defect {defect:e})")]
    NotSkewHermitian { defect: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("eigenvalue within {distance:e} of -1, principal logarithm is at its branch cut")]
    BranchEdge { distance: f64 },
    #[error("juncture needs an even number of components, got {0}")]
    OddComponentCount(usize),
    #[error("components do not commute (residual {residual:e})")]
    NotCommuting { residual: f64 },
    #[error("component is not normal (residual {residual:e})")]
    NotNormal { residual: f64 },
    #[error("cluster centroids closer than twice the clustering tolerance")]
    ClusterOverlap,
    #[error("partitions of unity do not commute (residual {residual:e})")]
    NotCommutingOpus { residual: f64 },
    #[error("invalid orthogonal partition of unity: {0}")]
    InvalidOpu(String),
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("grid spacing must lie in (0, 2], got {0}")]
    BadDelta(f64),
    #[error("tuple is not in the matrix cube: {0}")]
    NotInCube(String),
    #[error("tuple is not in the matrix disk: {0}")]
    NotInDisk(String),
    #[error("retraction target set is empty")]
    EmptyTarget,
    #[error("retraction target {0} meets the source grid")]
    TargetOnGrid(f64),
    #[error("endpoint components do not cross-commute (residual {residual:e})")]
    NotCrossCommuting { residual: f64 },
    #[error("candidate {index} is not a zero of the system (residual {residual:e})")]
    NotAZero { index: usize, residual: f64 },
    #[error("candidates {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("zero set is empty")]
    EmptyZeroSet,
    #[error("endpoints too far apart for a consistent spectral matching: {0}")]
    DeltaTooLarge(String),
    #[error("joint spectrum row {row} lies {distance:e} away from the zero set")]
    SpectraOffZeroSet { row: usize, distance: f64 },
    #[error("epsilon {0} outside the admissible range (0, 4 sin(1/8))")]
    EpsilonTooLarge(f64),
    #[error("tuple fails algebraic membership: {0}")]
    NotMember(String),
    #[error("tuple fails nearly-algebraic membership: {0}")]
    NotNearlyMember(String),
    #[error("joint spectrum row {row} has no zero-set point within half the gap (distance {distance:e})")]
    NoNearbyZero { row: usize, distance: f64 },
    #[error("paths do not meet at the junction (gap {gap:e})")]
    DiscontinuousJoin { gap: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
