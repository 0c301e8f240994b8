use alloc::string::String;

use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown gallery name `{0}`")]
    UnknownGallery(String),
    #[error("resolution must be positive, got {0}")]
    NonPositiveResolution(f64),
    #[error("gallery `{name}` expects a {expected} resolution")]
    ResolutionKind { name: String, expected: &'static str },
    #[error("a net space needs at least one point")]
    EmptySpace,
    #[error("duplicate point id {0}")]
    DuplicatePointId(u64),
    #[error("point {id}: {reason}")]
    InvalidPoint { id: u64, reason: &'static str },
    #[error("covering radius must be positive and finite, got {0}")]
    InvalidCoveringRadius(f64),
    #[error("operands live on different spaces")]
    SpaceMismatch,
    #[error("assignment has {got} entries but the domain has {expected} points")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment target {0} is not a codomain point")]
    AssignmentTarget(usize),
    #[error("point index {0} is out of range")]
    PointOutOfRange(usize),
    #[error("invalid weight {weight} at point {index}")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("value {value} lies outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("the point set is empty")]
    EmptySet,
    #[error("grid function has {got} values, space has {expected} points")]
    FunctionLength { expected: usize, got: usize },
    #[error("kernel has {got} measures for {expected} base points")]
    KernelLength { expected: usize, got: usize },
    #[error("kernel is not normalized")]
    NotNormalized,
    #[error("not a section: deviation {deviation} at base point {base} exceeds {tol}")]
    NotASection { base: usize, deviation: f64, tol: f64 },
    #[error("fiber over base point {0} is empty")]
    EmptyFiber(usize),
    #[error("no point of the support set lies over the smoothing window of base point {0}")]
    EmptyNeighborhood(usize),
    #[error("vertex {0} of the kernel polytope is not a deterministic selection")]
    NonIntegralVertex(usize),
    #[error("instance too large for brute force: {0} candidate bases")]
    TooLarge(u128),
    #[error("target {target} is not a point of the depth-{depth} dyadic grid")]
    TargetOffGrid { target: f64, depth: u32 },
    #[error("depth must be at least {min}, got {got}")]
    Depth { min: u32, got: u32 },
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    Parameter { name: &'static str, requirement: &'static str, value: f64 },
    #[error("linear program: {0}")]
    Lp(#[from] LpError),
}
