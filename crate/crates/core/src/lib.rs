//! Finite-dimensional C*-algebras as multi-matrix algebras, with the exact
//! machinery for amalgamated free products over them: inclusions, traces,
//! conditional expectations, the residual finite dimensionality decision and
//! non-injectivity certificates.

pub mod algebra;
pub mod cert;
pub mod condexp;
pub mod diagram;
pub mod document;
pub mod error;
pub mod inclusion;
pub mod rfd;
pub mod sample;
pub mod trace;
pub mod unitization;

pub use algebra::{minimal_central_projections, Element, FdAlgebra, MatrixUnit};
pub use condexp::CondExp;
pub use diagram::{validate_diagram, AmalgamSetup, DiagramReport, Expectations, UpperRow};
pub use error::AlgebraError;
pub use inclusion::{Inclusion, StarHomFailure, StarHomReport};
pub use rfd::{rfd_decide, RfdDecision, RfdError};
pub use trace::Trace;
pub use unitization::{unitize, unitize_inclusion, Unitization, UnitizedElement};
