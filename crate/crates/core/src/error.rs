use thiserror::Error;
use vinf_exact::ExactError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error("precision cap exceeded: {0}")]
    PrecisionExceeded(String),
    #[error("the zero polynomial has no finite valuation")]
    ZeroPolynomial,
    #[error("(-1, -1) is the root valuation -deg, not a divisorial node")]
    RootValuation,
    #[error("not a divisorial valuation")]
    NotDivisorial,
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("a root of {0} is not rational; the expansion needs a field extension")]
    NeedsFieldExtension(String),
    #[error("polynomial is zero or constant")]
    ZeroOrConstant,
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("skewness {alpha} of an extra valuation exceeds the bound {bound}")]
    SkewnessTooHigh { alpha: String, bound: String },
    #[error("singular linear system")]
    SingularSystem,
    #[error("kernel of M(S) has dimension {0}, expected 1")]
    KernelDimensionNotOne(usize),
    #[error("kernel vector of M(S) is not positive")]
    NonPositiveKernel,
    #[error("indeterminate value: {0}")]
    Indeterminate(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
