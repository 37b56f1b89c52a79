use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock space: {0}")]
    InvalidSpace(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("operators live on different Fock spaces")]
    SpaceMismatch,

    #[error("level index {n} out of range for dimension {dim}")]
    LevelOutOfRange { n: usize, dim: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not diagonal (off-diagonal magnitude {0:e})")]
    NotDiagonal(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("margin rule violated: n_max = {n_max} exceeds dim - 5 = {limit} (q^4 couples n to n±4)")]
    Margin { n_max: usize, limit: i64 },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("potential does not exist: Jacobian asymmetry {0:e}")]
    NotPotential(f64),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("integration step rejected at t = {t}: trace drift {drift:e} exceeds 1e-6")]
    StepRejected { t: f64, drift: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}
