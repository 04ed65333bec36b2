use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("impossible parameters: {0}")]
    ImpossibleParameters(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size limit exceeded: {what} = {value} exceeds limit {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a dimer covering: {0}")]
    NotACovering(String),

    #[error("projector set is not in product form")]
    NotProductForm,

    #[error("continuation failed at t = {t:.6}: {reason}")]
    ContinuationFailure { t: f64, reason: String },

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ImpossibleParameters(_) => "impossible_parameters",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidInput(_) => "invalid_input",
            Error::LimitExceeded { .. } => "limit_exceeded",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotACovering(_) => "not_a_covering",
            Error::NotProductForm => "not_product_form",
            Error::ContinuationFailure { .. } => "continuation_failure",
            Error::NoBracket(_) => "no_bracket",
            Error::Domain(_) => "domain",
            Error::Quadrature(_) => "quadrature",
            Error::LinearAlgebra(_) => "linear_algebra",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
