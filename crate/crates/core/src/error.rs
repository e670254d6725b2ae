use thiserror::Error;

pub type Result<T> = std::result::Result<T, DgError>;

#[derive(Debug, Error)]
pub enum DgError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed: {0}")]
    Validation(String),

    /// A computation needed algebra degree `needed`, beyond the configured cap.
    #[error("degree cap exceeded: need algebra degree {needed}, cap is {cap}")]
    CapExceeded { needed: i64, cap: usize },

    #[error("malformed algebra table: {0}")]
    MalformedTable(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("not an idempotent: {0}")]
    NotIdempotent(String),

    #[error("sign check failed: {0}")]
    SignCheckFailed(String),

    #[error("internal sign error: {0}")]
    InternalSignError(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("not projective: {0}")]
    NotProjective(String),

    #[error("expression failure: {0}")]
    ExpressionFailure(String),

    #[error("submodule not closed under the differential: {0}")]
    NotClosed(String),

    #[error("quotient is not DG free on cocycles: {0}")]
    QuotientNotFree(String),

    #[error("not quasi-trivial: {0}")]
    NotQuasiTrivial(String),

    #[error("beta is not bijective: {0}")]
    BetaNotBijective(String),

    #[error("module is not semi-free over its basis: {0}")]
    NotFilterable(String),

    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),

    #[error("generator budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("inconclusive: lower bound {lower}, upper bound {upper}")]
    Inconclusive { lower: i64, upper: i64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl DgError {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            DgError::Parse(_) | DgError::MalformedTable(_) => 2,
            DgError::Validation(_)
            | DgError::ShapeMismatch(_)
            | DgError::NotChainMap(_)
            | DgError::NotIdempotent(_)
            | DgError::NotProjective(_)
            | DgError::ExpressionFailure(_)
            | DgError::NotClosed(_)
            | DgError::QuotientNotFree(_)
            | DgError::NotQuasiTrivial(_)
            | DgError::BetaNotBijective(_)
            | DgError::NotFilterable(_)
            | DgError::InvalidParameter(_) => 3,
            DgError::Inconclusive { .. } => 4,
            DgError::CapExceeded { .. } | DgError::WindowTooSmall(_) | DgError::SearchBudgetExceeded(_) | DgError::BudgetExceeded(_) => 5,
            DgError::SignCheckFailed(_) | DgError::InternalSignError(_) | DgError::Internal(_) | DgError::Io(_) => 1,
        }
    }
}
