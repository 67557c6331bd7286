use fdca_exact::LinalgError;

use crate::algebra::MatrixUnit;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("block {index} has size zero")]
    InvalidBlockSize { index: usize },
    #[error("element shape: {0}")]
    ElementShape(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inclusion is not injective: source block {block} maps to zero")]
    NotInjective { block: usize },
    #[error("image of {unit} lives in the wrong algebra")]
    ImageShape { unit: MatrixUnit },
    #[error("trace vector has length {got}, algebra has {expected} blocks")]
    LengthMismatch { expected: usize, got: usize },
    #[error("trace is not faithful")]
    NonFaithfulTrace,
    #[error("inclusion source/target do not match: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
