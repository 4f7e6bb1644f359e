use thiserror::Error;

use crate::complex::{CubeId, HyperplaneId, Vertex};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("graph is disconnected: vertex {unreachable} is not reachable from vertex 0")]
    Disconnected { unreachable: Vertex },

    /// A vertex triple whose median set does not have exactly one element.
    #[error("not a median graph: triple {triple:?} has {median_count} medians")]
    NotMedian {
        triple: [Vertex; 3],
        median_count: usize,
    },

    #[error("cube dimension exceeds the configured limit of {limit}")]
    DimensionExceeded { limit: usize },

    #[error("cube count {count} exceeds the configured cap of {cap}")]
    SizeOverflow { count: u128, cap: u128 },

    #[error("hyperplane {hyperplane:?} is not adjacent to cube {cube:?} on the far side")]
    NotAdjacent { cube: CubeId, hyperplane: HyperplaneId },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("weight of hyperplane {hyperplane} must be positive and finite, got {value}")]
    NonPositiveWeight { hyperplane: usize, value: f64 },

    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    #[error("D^2 law violated at cube {cube:?}: deviation {deviation}")]
    LawViolated { cube: CubeId, deviation: f64 },

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("spectral list exceeds the cap of {cap} entries")]
    TruncationOverflow { cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scalar estimate violated: {0}")]
    EstimateViolated(String),

    #[error("deformation bound violated at s = {s}: deviation {deviation} > bound {bound}")]
    BoundViolated { s: f64, deviation: f64, bound: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("not an automorphism: edge ({}, {}) maps to a non-edge", .edge.0, .edge.1)]
    NotAutomorphism { edge: (Vertex, Vertex) },

    #[error("conjugation identity violated at entry ({row}, {col})")]
    IdentityViolated { row: usize, col: usize },

    #[error("difference support law violated at entry ({row}, {col})")]
    SupportViolated { row: usize, col: usize },
}
