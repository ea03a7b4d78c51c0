use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// `M * adj(T)` is not divisible by `det(T)`: `M Z^k` is not contained in the lattice.
    #[error("M*Z^k is not a sublattice of the lattice spanned by T")]
    NotSublattice,
    #[error("the identity element has no distance constraint")]
    IdentityElement,
    #[error("group contains only the identity")]
    EmptyGroup,
    #[error("zero radius at block {0}")]
    DegenerateRadius(usize),
    #[error("brute-force guard exceeded: {size} elements (limit {limit})")]
    GuardExceeded { size: usize, limit: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("odd dimension requires even order (got M = {0})")]
    OddOrder(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generators span a group of order {actual}, expected {expected}")]
    WrongOrder { expected: u64, actual: u64 },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
