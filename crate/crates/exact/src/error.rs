use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("indeterminate form: {0}")]
    Indeterminate(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("+inf entries are not allowed in a limit matrix")]
    PositiveInfinityEntry,
    #[error("truncation underflow: resulting order {0} is below 1")]
    TruncationUnderflow(i64),
    #[error("substitution series must have zero constant term")]
    NonLocalSubstitution,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid series data: {0}")]
    InvalidSeries(String),
    #[error("division by zero")]
    DivisionByZero,
}
