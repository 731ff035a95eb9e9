//! Error types shared across the crate.

use thiserror::Error;

/// A violated construction invariant, with witness indices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("distance matrix is not square: row {row} has length {len}, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("space must contain at least one point (the root)")]
    Empty,
    #[error("non-finite distance entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("negative distance entry at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("nonzero diagonal entry at ({i}, {i})")]
    NonzeroDiagonal { i: usize },
    #[error("asymmetric distance matrix at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("triangle inequality violated at ({i}, {j}, {k}): d(i,k) > d(i,j) + d(j,k)")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("negative mass at point {i}")]
    NegativeMass { i: usize },
    #[error("root index {root} out of range for {n} points")]
    BadRoot { root: usize, n: usize },
    #[error("mass vector has length {len}, expected {expected}")]
    BadMassLength { len: usize, expected: usize },
    #[error("label vector has length {len}, expected {expected}")]
    BadLabelLength { len: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),

    #[error("measures live on different ground spaces")]
    GroundMismatch,

    #[error("subset input must be nonempty")]
    EmptySet,

    #[error("total masses differ; a coupling requires equal totals")]
    UnequalTotalMass,

    #[error("subspace support must contain the root")]
    SupportMissingRoot,

    #[error("point {i} is outside the parent space")]
    SupportOutOfRange { i: usize },

    #[error("mass bound violated at point {i}")]
    MassBoundViolation { i: usize },

    #[error("{op}: problem size {size} exceeds the budget {limit}")]
    BudgetExceeded {
        op: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("flow network admits an unbounded flow")]
    UnboundedFlow,

    #[error("graph is disconnected: vertex {vertex} is unreachable from the root")]
    Disconnected { vertex: usize },

    #[error("graph has a self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },

    #[error("graph has a duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("vertex index {vertex} out of range for {n} vertices")]
    BadVertex { vertex: usize, n: usize },

    #[error("certificate is not in exact mode")]
    NotExact,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
