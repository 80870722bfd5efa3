use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a multigraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("expected distinct vertices, got {0} twice")]
    SameVertex(usize),

    #[error("vertex {0} must not belong to the window")]
    VertexInWindow(usize),

    #[error("multigraphs have different orders ({0} vs {1})")]
    OrderMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("edge weight overflow (weights are limited to {max})", max = u8::MAX)]
    WeightOverflow,

    #[error("canonical form limited to n <= {limit}, got n = {n}")]
    CanonicalLimit { n: usize, limit: usize },

    #[error("multigraph is not in D(n)")]
    NotInD,

    #[error("multigraph is not neat")]
    NotNeat,

    #[error("multigraph has a zero weight; the quotient needs weights >= 1")]
    ZeroWeight,

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("vertex-weighted graph is not a forest")]
    NotForest,

    #[error("vertex-weighted graph is not a star")]
    NotStar,

    #[error("malformed multigraph file: {0}")]
    Parse(String),

    #[error("search budget of {budget} nodes exhausted after {explored} nodes (partial count {partial})")]
    BudgetExceeded {
        budget: u64,
        explored: u64,
        partial: String,
    },

    #[error("certified comparison inconclusive at {bits} bits: {what}")]
    Inconclusive { what: String, bits: u32 },
}

impl Error {
    /// Budget and precision failures are operational, not logical.
    pub fn is_resource_error(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Inconclusive { .. })
    }
}
