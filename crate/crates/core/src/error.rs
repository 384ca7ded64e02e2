use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("not completely positive: Choi matrix has eigenvalue {0:.3e}")]
    NotCompletelyPositive(f64),

    #[error("pencil is not monic; translate to an interior point with `monicize` first ({0})")]
    NotMonic(String),

    #[error("point is not strictly feasible (lambda_min = {0:.3e})")]
    NotStrictlyFeasible(f64),

    #[error("annihilation violated: y-terms survive with magnitude {0:.3e}")]
    AnnihilationViolated(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at {locus}: {message}")]
    Parse { locus: String, message: String },

    #[error("{field}: {source}")]
    At { field: String, source: Box<Error> },
}

impl Error {
    /// The underlying error with any field locus stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::At { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
