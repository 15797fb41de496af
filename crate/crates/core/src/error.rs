use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid discriminant form: {0}")]
    InvalidDiscriminantForm(String),

    #[error("discriminant form mismatch: {0}")]
    DfMismatch(String),

    #[error("division by zero in cyclotomic field Q(zeta_{0})")]
    DivisionByZero(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("weight {weight} is not admissible: {reason}")]
    Weight { weight: String, reason: String },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("rational reconstruction failed for {what}: {reason}")]
    Reconstruction { what: String, reason: String },

    #[error("depth mismatch: {0}")]
    DepthMismatch(String),

    #[error("no solution to the congruence system: {0}")]
    NoSolution(String),

    #[error("integrality violated: {0}")]
    Integrality(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
