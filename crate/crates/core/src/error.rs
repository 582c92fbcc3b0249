use thiserror::Error;

/// Errors raised by the construction and certification routines.
///
/// Verification outcomes (a family that fails a consistency condition, a
/// dagger that does not pair invertibly, ...) are *not* errors; they are
/// returned as values so callers can report the witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    CycleDetected(String, String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateIdentifier(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("trace matrix for ({lower}, {upper}) has shape {got:?}, expected {expected:?}")]
    ShapeMismatch {
        lower: String,
        upper: String,
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("missing trace matrix for cover relation ({0}, {1})")]
    MissingTrace(String, String),
    #[error("subset is not a lower set: `{member}` is present but `{missing}` is not")]
    NotLowerSet { member: String, missing: String },
    #[error("poset has no top element")]
    NoTopElement,
    #[error("`{0}` is not a maximal element of the lower set")]
    NotMaximal(String),
    #[error("not a local extension operator at `{element}`: {condition}")]
    NotLocalOperator { element: String, condition: String },
    #[error("stacked extension of `{0}` is not a compatible tuple")]
    NotCompatible(String),
    #[error("extension family is not consistent ({0} violations)")]
    InconsistentFamily(usize),
    #[error("no local decomposition available for `{0}`")]
    MissingDecomposition(String),
    #[error("dagger space at `{0}` fails the pairing condition")]
    InvalidDagger(String),
    #[error("cell {cell:?} repeats vertex {vertex}")]
    DuplicateVertexInCell { cell: Vec<usize>, vertex: usize },
    #[error("cell {cell:?} references vertex {vertex} but the complex has {vertex_count} vertices")]
    IndexOutOfRange {
        cell: Vec<usize>,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {0:?} is not in the complex")]
    UnknownFace(Vec<usize>),
    #[error("no simplicial extension operator supplied for dimension {0}")]
    MissingEm(usize),
    #[error("complex has no ({0})-face with an {1}-dimensional subface")]
    NoSuitableFacePair(usize, usize),
    #[error("form is not in the span of the space basis")]
    NotInSpace,
    #[error("certificate check failed: {0}")]
    CertificateFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
