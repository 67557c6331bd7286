use fdca_exact::scalar::rational_vec;
use fdca_exact::{GaussRational, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, FdAlgebra};
use crate::error::AlgebraError;

/// A positive tracial functional, given by its value `sᵢ` on a minimal
/// projection of each block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    algebra: FdAlgebra,
    #[serde(with = "rational_vec")]
    s: Vec<Rational>,
}

impl Trace {
    pub fn new(algebra: &FdAlgebra, s: Vec<Rational>) -> Result<Self, AlgebraError> {
        if s.len() != algebra.num_blocks() {
            return Err(AlgebraError::LengthMismatch { expected: algebra.num_blocks(), got: s.len() });
        }
        Ok(Trace { algebra: algebra.clone(), s })
    }

    /// The default faithful tracial state `sᵢ = nᵢ / Σ nⱼ²`.
    pub fn default_for(algebra: &FdAlgebra) -> Self {
        Trace { algebra: algebra.clone(), s: algebra.default_trace_weights() }
    }

    /// The normalized trace on `M_n`.
    pub fn normalized_full(n: usize) -> Self {
        Trace { algebra: FdAlgebra::full(n), s: vec![fdca_exact::rat(1, n as i64)] }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn weights(&self) -> &[Rational] {
        &self.s
    }

    pub fn apply(&self, x: &Element) -> GaussRational {
        assert_eq!(x.algebra(), self.algebra, "trace applied outside its algebra");
        x.blocks()
            .iter()
            .zip(&self.s)
            .map(|(b, s)| b.trace() * GaussRational::from_real(s.clone()))
            .sum()
    }

    pub fn is_faithful(&self) -> bool {
        self.s.iter().all(Signed::is_positive)
    }

    /// `τ(1) = Σ nᵢ sᵢ`.
    pub fn total(&self) -> Rational {
        self.algebra
            .block_sizes()
            .iter()
            .zip(&self.s)
            .map(|(&n, s)| s * Rational::from_integer((n as i64).into()))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_state(&self) -> bool {
        self.total().is_one()
    }

    /// Rescale so that `τ(1) = 1`. Fails on the zero functional.
    pub fn normalized(&self) -> Option<Trace> {
        let t = self.total();
        if t.is_zero() {
            return None;
        }
        Some(Trace { algebra: self.algebra.clone(), s: self.s.iter().map(|s| s / &t).collect() })
    }
}
