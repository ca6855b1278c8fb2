use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("edge {{{u}, {v}}} has non-positive or non-finite weight {weight}")]
    NonpositiveWeight { u: usize, v: usize, weight: f64 },

    #[error("vertex {vertex} has non-positive or non-finite measure {measure}")]
    NonpositiveMeasure { vertex: usize, measure: f64 },

    #[error("signatures from different groups cannot be combined")]
    MixedGroups,

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("measure has {got} entries, expected {expected}")]
    MeasureLength { expected: usize, got: usize },

    #[error("group element does not belong to the graph's signature group")]
    WrongGroup,

    #[error("switching function is undefined at vertex {0}")]
    IncompleteAssignment(usize),

    #[error("vertex sequence is not a cycle: {0}")]
    NotACycle(String),

    #[error("enumeration needs {required} evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("exact computation is unavailable for the continuous group S^1 on this subgraph")]
    ContinuousGroup,

    #[error("isoperimetric dimension must exceed {min}, got {delta}")]
    BadDelta { delta: f64, min: f64 },

    #[error("truncation level must lie in (0, 1], got {0}")]
    BadT(f64),

    #[error("point {0} lies outside the closed unit disk")]
    OutsideDisk(num_complex::Complex64),

    #[error("function is not normalized: max |f| = {0}")]
    NotNormalized(f64),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("invalid exponents: {0}")]
    BadExponents(String),

    #[error("isoperimetric constant is zero (balanced graph has no isoperimetric dimension)")]
    ZeroConstant,

    #[error("exponent alpha must be at least 1, got {0}")]
    BadAlpha(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigenvalues of the real embedding do not pair up: {0}")]
    PairingFailure(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("singular linear solve: {0}")]
    SingularSolve(String),

    #[error("function has {got} entries, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("argument error: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
