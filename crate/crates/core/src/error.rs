use crate::graph::VertexId;
use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Structural errors (bad identifiers, dangling references, malformed text)
/// indicate unusable input; refusals (`NotNegativeDefinite`, `NotMinimal`,
/// `NotLogTerminal`, ...) indicate well-formed input outside the domain of
/// the requested analysis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid vertex id {id:?}: {reason}")]
    InvalidId { id: String, reason: &'static str },

    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),

    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),

    #[error("self-intersection edge at {0}; a curve meets itself transversally nowhere")]
    SelfLoop(VertexId),

    #[error("duplicate edge between {0} and {1}; intersection multiplicities above 1 are not supported")]
    DuplicateEdge(VertexId, VertexId),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: matrix has {rows} rows, vector has {len} entries")]
    DimensionMismatch { rows: usize, len: usize },

    #[error("matrix is not symmetric at ({row},{col})")]
    NonSymmetric { row: usize, col: usize },

    #[error("matrix is singular; the system has no unique solution")]
    Singular,

    #[error("intersection matrix is not negative definite; the graph does not arise from a resolution")]
    NotNegativeDefinite,

    #[error("profile does not belong to this graph (vertex sets differ)")]
    ProfileMismatch,

    #[error("cycle does not belong to this graph (vertex sets differ)")]
    CycleMismatch,

    #[error("no edge between {0} and {1}")]
    MissingEdge(VertexId, VertexId),

    #[error("no boundary incidence at {0}")]
    NoBoundaryAt(VertexId),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{p} does not divide the index {index}; the cover is tame and the cover-step analysis does not apply")]
    TameCharacteristic { p: u64, index: String },

    #[error("graph is not minimal: {0} has self-intersection {1} > -2")]
    NotMinimal(VertexId, i64),

    #[error("graph is not log terminal; the cover analysis does not apply")]
    NotLogTerminalInput,

    #[error("index times coefficient is not an integer at {0}; the profile is corrupted")]
    NonIntegralMultiple(VertexId),

    #[error("residue data inconsistent at end vertex {0}: a zero-residue end vertex cannot have a sole neighbor with nonzero residue")]
    ResidueInconsistency(VertexId),

    #[error("edge center ({0},{1}) with both residues zero is outside the supported trichotomy")]
    UnhandledCenter(VertexId, VertexId),

    #[error("center kind is outside the free/edge trichotomy")]
    UnsupportedCenter,

    #[error("graph is not a tree (disconnected or contains a cycle)")]
    NotATree,

    #[error("graph carries boundary incidences; this analysis requires an empty boundary")]
    BoundaryPresent,

    #[error("self-intersection underflow at {0}")]
    WeightUnderflow(VertexId),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
