use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of each
/// subsystem; library functions never panic on bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial has no lowest term")]
    ZeroPolynomial,
    #[error("index {idx:?} outside shape {shape:?}")]
    IndexOutOfShape { idx: Vec<usize>, shape: Vec<usize> },
    #[error("scalar kinds do not match: {0}")]
    ScalarKindMismatch(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("tensor is zero")]
    ZeroTensor,
    #[error("invalid family parameters: {0}")]
    BadSpec(String),
    #[error("invalid dimension: {0}")]
    BadDim(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unsupported arity {0}; the exact multiqubit decision covers 2..=4")]
    UnsupportedArity(usize),
    #[error("certificate too weak: {0}")]
    WeakCertificate(String),
    #[error("support is not block pyramidal: {0}")]
    NotBlockPyramidal(String),
    #[error("certificate subject mismatch: {0}")]
    CertificateSubjectMismatch(String),
    #[error("certificate does not witness minimal rank: {0}")]
    NotMinimalRank(String),
    #[error("rearrangement failed: {0}")]
    RearrangementFailed(String),
    #[error("not a degeneration: {0}")]
    NotADegeneration(String),
    #[error("invalid epsilon decomposition: {0}")]
    InvalidEpsDecomposition(String),
    #[error("decomposition does not reproduce the tensor")]
    UnverifiedDecomposition,
    #[error("arity {0} exceeds the bipartition cap {1}")]
    ArityCapExceeded(usize, usize),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
