//! Exact linear algebra over the Gaussian rationals ℚ(i).
//!
//! Everything here is exact: row reduction, null spaces, positive
//! semidefiniteness and LP feasibility never round. Matrices are small and
//! stored densely.

pub mod lp;
pub mod matrix;
pub mod psd;
pub mod scalar;

pub use lp::{strictly_positive_nullvector, PositiveNullOutcome, StiemkeCertificate};
pub use matrix::RatMatrix;
pub use psd::is_psd;
pub use scalar::{format_rational, parse_rational, rat, rat_int, GaussRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not self-adjoint")]
    NotSelfAdjoint,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-real entries")]
    NotReal,
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("ragged rows")]
    Ragged,
    #[error("{0}")]
    Parse(String),
}
