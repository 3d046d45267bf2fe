use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("value is not an eigenvalue of the operator")]
    NotAnEigenvalue,
    #[error("first form is degenerate; rename the pencil so that Q1 is nondegenerate")]
    NeedNondegenerateQ1,
    #[error("polynomial does not split over the working field")]
    NeedsExtension,
    #[error("pencil is not generic: {0}")]
    NotGeneric(String),
    #[error("pencil is not regular")]
    NotRegular,
    #[error("discriminant curve is reducible (p_g = -1)")]
    ReducibleCurve,
    #[error("reduction vector is not an isotropic eigenvector")]
    BadReductionVector,
    #[error("no reduction applies here: {0}")]
    NotReducibleHere(String),
    #[error("no reflection vector available in Y \\ X")]
    DegenerateSpan,
    #[error("cone point lies on X")]
    ConeOnX,
    #[error("no rational distinguished point on the curve")]
    NoBasePoint,
    #[error("set is not closed under the group action")]
    ActionNotClosed,
    #[error("fixture pairing unexpectedly zero: {0}")]
    FixtureDegenerate(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("input exceeds the desk-scale envelope: {0}")]
    SizeGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
