use thiserror::Error;

/// Errors raised by graph construction, the sparsifiers and the
/// lower-bound builders. Audit findings are reported, not raised.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) has zero weight")]
    ZeroWeight(usize, usize),
    #[error("graph has {n} vertices, above the audit cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid eps {0}: must lie in (0, 1)")]
    InvalidEps(f64),
    #[error("invalid alpha {0}: must lie in (0, 1)")]
    InvalidAlpha(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("vertices {0} and {1} are not connected")]
    Unreachable(usize, usize),
    #[error("graphs have different vertex counts ({0} vs {1})")]
    VertexSetMismatch(usize, usize),
    #[error("edge ({0}, {1}) of H is not an edge of G")]
    NotSubgraph(usize, usize),
    #[error("d_H({0}, {1}) = {2} undershoots d_G = {3}")]
    Undershoot(usize, usize, u64, u64),
    #[error("pair ({0}, {1}) is connected in G but not in H")]
    Disconnected(usize, usize),
    #[error("greedy phase exceeded {0} rounds")]
    NonterminationGuard(usize),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("annulus for radius {0} contains no lattice point")]
    TooSparse(u64),
    #[error("cannot carve stripes: {0}")]
    InfeasibleStripes(String),
    #[error("base graph specification violated: {0}")]
    SpecViolation(String),
    #[error("divisibility violated: {0}")]
    DivisibilityViolation(String),
    #[error("cardinality mismatch: {0}")]
    CardinalityMismatch(String),
    #[error("subdivision length is not integral: |V_I| = {vertices}, |P_I| = {pairs}; nearest admissible |V_I| is {nearest}")]
    NonIntegralZ {
        vertices: usize,
        pairs: usize,
        nearest: usize,
    },
    #[error("port collision at inner copy {copy}, port {port}")]
    PortCollision { copy: usize, port: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
