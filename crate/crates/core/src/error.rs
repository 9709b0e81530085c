use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: asymmetry defect {defect:e} exceeds {limit:e}")]
    AsymmetricInput { defect: f64, limit: f64 },

    #[error("eigenvalue iteration did not converge on a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("not enough moments: need at least {needed}, have {available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("polynomial degree {degree} exceeds truncation order {max}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("not enough terms to test a degree-{degree} relation: need {needed}, have {available}")]
    InsufficientTerms {
        degree: usize,
        needed: usize,
        available: usize,
    },

    #[error("no linear recurrence of degree <= {max_degree} fits the data (best residual {best_residual:e})")]
    NoRecurrenceFound { max_degree: usize, best_residual: f64 },

    #[error("entrywise roots cannot be merged consistently: {detail}")]
    InconsistentRoots { detail: String },

    #[error("minimal polynomial has a non-real root {re} {im:+}i; no real atomic measure exists")]
    ComplexRoots { re: f64, im: f64 },

    #[error("minimal polynomial has root {root} of multiplicity {multiplicity}; no representing measure exists")]
    RepeatedRoots { root: f64, multiplicity: usize },

    #[error("Vandermonde system is ill-conditioned (condition estimate {condition:e} > {limit:e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("nodes are not separated: gap {gap:e} <= {limit:e}")]
    DegenerateNodes { gap: f64, limit: f64 },

    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Schema(String),

    #[error("{0}")]
    Io(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    /// Stable machine-readable name used in error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "NonSquare",
            Error::DimensionMismatch { .. } => "DimensionError",
            Error::AsymmetricInput { .. } => "AsymmetricInput",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::InsufficientMoments { .. } => "InsufficientMoments",
            Error::DegreeTooHigh { .. } => "DegreeTooHigh",
            Error::InsufficientTerms { .. } => "InsufficientTerms",
            Error::NoRecurrenceFound { .. } => "NoRecurrenceFound",
            Error::InconsistentRoots { .. } => "InconsistentRoots",
            Error::ComplexRoots { .. } => "ComplexRoots",
            Error::RepeatedRoots { .. } => "RepeatedRoots",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::DegenerateNodes { .. } => "DegenerateNodes",
            Error::InvalidRecurrence(_) => "SchemaError",
            Error::InvalidTolerance(_) => "SchemaError",
            Error::Parse(_) => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::Io(_) => "IoError",
            Error::NonFinite(_) => "NonFinite",
        }
    }
}
