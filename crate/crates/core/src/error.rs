use thiserror::Error;

/// Errors shared across the graph model, the primitives, the former, and the
/// verification oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node v{node} is out of range for a graph on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node v{node} is not allowed")]
    SelfLoop { node: usize },

    #[error("duplicate edge (v{src}, v{dst})")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("benefit edge (v{src}, v{dst}) must carry a positive finite weight, got {weight}")]
    BadWeight { src: usize, dst: usize, weight: f64 },

    #[error("coalitions must be non-empty")]
    EmptyCoalition,

    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },

    #[error("node v{node} is not a member of the coalition")]
    NotAMember { node: usize },

    #[error("graphs disagree on node count: {left} vs {right}")]
    NodeCountMismatch { left: usize, right: usize },

    /// A guarded operation was handed an input larger than its configured cap.
    #[error("{what}: size {actual} exceeds the configured limit of {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("simple-path enumeration requires distinct endpoints, got v{node} twice")]
    SamePathEndpoints { node: usize },

    /// An exhaustive enumeration produced more results than the caller allowed.
    /// Aborting beats silently returning a truncated (and thus untrustworthy)
    /// answer.
    #[error("{what} exceeded the enumeration limit of {limit}")]
    EnumerationLimit { what: &'static str, limit: usize },

    #[error("merge candidate refers to coalition id {id}, which is not live")]
    StaleCandidate { id: usize },

    #[error("invalid merge candidate: {reason}")]
    InvalidCandidate { reason: String },
}
