use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{cutoff:e}")]
    NotPsd { eigenvalue: f64, cutoff: f64 },

    #[error("decomposition failed to converge: {0}")]
    Convergence(&'static str),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate data: all observations coincide (rank 0)")]
    DegenerateData,

    #[error("data not in general position: rank {rank}, expected {expected}")]
    NotGeneralPosition { rank: usize, expected: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid target configuration: {0}")]
    Target(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("group '{label}' has {size} observation(s); at least 2 are required")]
    InsufficientGroup { label: String, size: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("domain error at row {row}, column {col}: {message}")]
    Domain {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
