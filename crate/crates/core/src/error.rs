use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands live in different graded contexts")]
    ContextMismatch,
    #[error("duplicate name `{0}` in context")]
    DuplicateName(String),
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("connection is not flat: {0}")]
    NonFlatConnection(String),
    #[error("form is not closed: {0}")]
    NotClosed(String),
    #[error("degree zero forms have no Spencer description")]
    DegreeZero,
    #[error("inhomogeneous input: {0}")]
    Inhomogeneous(String),
    #[error("not a vector field: {0}")]
    NotAVectorField(String),
    #[error("invalid Spencer data: {0}")]
    InvalidSpencerData(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("derivation is not homological: {0}")]
    NotHomological(String),
    #[error("wrong degree: expected {expected}, found {found}")]
    WrongDegree { expected: i32, found: i32 },
    #[error("form is not symplectic: {0}")]
    NotSymplectic(String),
    #[error("structure is not compatible: {0}")]
    NotCompatible(String),
    #[error("bundle map is degenerate (determinant vanishes identically)")]
    NotNondegenerate,
    #[error("connection 1-form is not closed: {0}")]
    NonClosedConnectionForm(String),
    #[error("subbundle drops rank: {0}")]
    RankDrop(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("unsupported context: {0}")]
    UnsupportedContext(String),
}
