use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("node {0} not in graph")]
    InvalidNode(usize),
    #[error("degenerate path: both endpoints are node {0}")]
    DegeneratePath(usize),
    #[error("invalid node pair: {0}")]
    InvalidPair(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("tree does not span the graph: {0}")]
    NotSpanning(String),
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("empty tree")]
    EmptyTree,
    #[error("degenerate tree: {0}")]
    DegenerateTree(String),
    #[error("wrong incidence graph kind: expected {expected}, got {got}")]
    WrongKind { expected: String, got: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("empty solution")]
    EmptySolution,
    #[error("stretch undefined: edge {0} has zero cost but a positive-cost tree path")]
    ZeroCostEdge(usize),
    #[error("not a cactus: {0}")]
    NotACactus(String),
    #[error("unsupported set family: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("unsupported format_version {0} (expected 1)")]
    VersionMismatch(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
