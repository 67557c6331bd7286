//! Floating-point GNS representations, extensions of representations along
//! inclusions, and truncated dilation towers with numerical verification.

pub mod common;
pub mod gns;
pub mod rep;
pub mod tower;

use fdca::{AlgebraError, DiagramReport};
use thiserror::Error;

pub use common::{common_representation, CommonRepresentation};
pub use gns::{extend_representation, gns, module_tensor, Extender, Extension, Gns, ModuleTensor};
pub use rep::{CMat, CVec, FloatMap, Representation};
pub use tower::{build_tower_condexp, build_tower_equal_d, Mode, Tower, TowerReport, DEFAULT_TOLERANCE};

#[derive(Debug, Error)]
pub enum DilationError {
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("representation is not unital (unit defect {0:e})")]
    NotUnitalRep(f64),
    #[error("input representations disagree on D (gap {0:e})")]
    DAgreementFailure(f64),
    #[error("diagram does not commute")]
    DiagramFailure(Box<DiagramReport>),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
