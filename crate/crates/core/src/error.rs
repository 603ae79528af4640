use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse group spec {spec:?}: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("group order {order} exceeds the configured cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("subgroup enumeration refused: group of order {order} exceeds the cap of {cap}")]
    SubgroupCap { order: usize, cap: usize },

    #[error("enumeration stopped after {count} partial sequences (cap {cap})")]
    EnumerationCap { count: usize, cap: usize },

    #[error("arity {arity} out of range (allowed 0..={max})")]
    ArityOutOfRange { arity: usize, max: usize },

    #[error("families live in different ambient groups ({left} vs {right})")]
    AmbientMismatch { left: String, right: String },

    #[error("sequences over different groups or arities cannot be compared")]
    MixedSequences,

    #[error("subgroup meets 1 x S_{arity} nontrivially, so it is not a graph subgroup")]
    NotAGraph { arity: usize },

    #[error("not a subgroup chain: {0}")]
    NotASubgroupChain(String),

    #[error("norm N_K^H with [H:K] = {index} needs max arity at least {index} (got {max_arity})")]
    ArityTooSmall { index: usize, max_arity: usize },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Resource-cap failures are reported separately from malformed input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::OrderCap { .. } | Error::SubgroupCap { .. } | Error::EnumerationCap { .. })
    }
}
