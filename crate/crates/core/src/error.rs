use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("polytope generators do not span R^{dim}")]
    RankDeficient { dim: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("point is not interior (gauge {gauge})")]
    NotInterior { gauge: f64 },

    #[error("rejection sampler accepted only {hits} points, need at least {needed}")]
    DegenerateAcceptance { hits: usize, needed: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear map is singular")]
    Singular,

    #[error("random matrix was singular after {attempts} attempts")]
    SingularT { attempts: usize },

    #[error("dimension {dim} too large (maximum {max})")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
