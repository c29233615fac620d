use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("phi(u) is nonzero, not a transvection")]
    NotNilpotent,
    #[error("u or phi is zero")]
    ZeroData,
    #[error("vector is not singular")]
    NonSingularVector,
    #[error("K-closure leaves the group")]
    ClosureLeavesGroup,
    #[error("field order is not a square")]
    QNotSquare,
    #[error("cycle is not two-way directed")]
    NotTwoWayCycle,
    #[error("not a two-way edge")]
    NotTwoWayEdge,
    #[error("cycle enumeration budget exceeded ({0} tuples)")]
    TooManyVertices(u64),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("wrong group family for this operation: {0}")]
    WrongFamily(String),
    #[error("exceptional field GF({0})")]
    ExceptionalField(u32),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("closure exceeded cap {0}")]
    CapExceeded(usize),
    #[error("case analysis exhausted without a certificate")]
    CaseAnalysisExhausted,
    #[error("vector sum is not singular")]
    NotSingular,
    #[error("element is not in the group")]
    NotInGroup,
    #[error("generating set contains no transvection")]
    NoTransvectionInX,
    #[error("instance too large for exhaustive search")]
    TooLarge,
    #[error("trace not reachable by the witness construction")]
    UnreachableTrace,
    #[error("pipeline does not support q = {0} for this family")]
    UnsupportedQ(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
