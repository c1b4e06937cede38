use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error(
        "graph has {count} isolated vertices (first: {first}); this operation requires d(v) >= 1"
    )]
    IsolatedVertices { count: usize, first: usize },

    #[error("invalid probability {0}; expected a value in [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("partition does not match configuration: {0}")]
    PartitionMismatch(String),

    #[error("treatment has {actual} treated vertices, expected {expected}")]
    TreatmentSize { expected: usize, actual: usize },

    #[error("type partition invalid: {0}")]
    TypePartition(String),

    #[error("enumeration of {required} design points exceeds the cap of {cap}")]
    EnumerationCap { required: u128, cap: u128 },

    #[error("vertex degree {degree} exceeds the brute-force cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("interference table has no entry for bidegree ({0}, {1})")]
    MissingTableEntry(usize, usize),

    #[error("treated-neighbor count {a} out of range for degree {degree}")]
    NeighborCount { a: usize, degree: usize },

    #[error("measure is not balanced: total mass {0:e}")]
    UnbalancedMeasure(f64),

    #[error("bidegree (0, 0) has no treated fraction; the metric requires a + b >= 1")]
    ZeroDegreeBidegree,

    #[error("transport solver did not converge after {0} pivots")]
    TransportStalled(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
