//! Unitization `A^u = A ⊕ ℂ` with product `(a,µ)(a′,µ′) = (aa′ + µa′ + µ′a, µµ′)`.
//!
//! For a multi-matrix algebra `A` (unital or not as a subalgebra datum),
//! `A^u` is again multi-matrix: `(a,µ) ↦ (a + µ1_A) ⊕ µ` is a
//! *-isomorphism onto `A ⊕ ℂ`. The character `ε(a,µ) = µ` reads the last block.

use std::ops::{Add, Mul, Sub};

use fdca_exact::{GaussRational, RatMatrix};
use num_traits::{One, Zero};

use crate::algebra::{Element, FdAlgebra};
use crate::inclusion::Inclusion;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unitization {
    base: FdAlgebra,
    algebra: FdAlgebra,
}

/// A pair `(a, µ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitizedElement {
    pub a: Element,
    pub mu: GaussRational,
}

pub fn unitize(base: &FdAlgebra) -> Unitization {
    Unitization { base: base.clone(), algebra: base.direct_sum(&FdAlgebra::full(1)) }
}

impl Unitization {
    pub fn base(&self) -> &FdAlgebra {
        &self.base
    }

    /// `A ⊕ ℂ` as a multi-matrix algebra.
    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn unit(&self) -> UnitizedElement {
        UnitizedElement { a: Element::zero(&self.base), mu: GaussRational::one() }
    }

    pub fn pair(&self, a: Element, mu: GaussRational) -> UnitizedElement {
        assert_eq!(a.algebra(), self.base, "pair component outside the base algebra");
        UnitizedElement { a, mu }
    }

    /// The ideal embedding `a ↦ (a, 0)`.
    pub fn embed(&self, a: &Element) -> UnitizedElement {
        self.pair(a.clone(), GaussRational::zero())
    }

    /// `ε(a, µ) = µ`.
    pub fn epsilon(&self, x: &UnitizedElement) -> GaussRational {
        x.mu.clone()
    }

    /// `(a, µ) ↦ (a + µ1_A) ⊕ µ`.
    pub fn to_direct_sum(&self, x: &UnitizedElement) -> Element {
        let shifted = &x.a + &Element::scalar(&self.base, x.mu.clone());
        let mut blocks = shifted.blocks().to_vec();
        blocks.push(RatMatrix::from_fn(1, 1, |_, _| x.mu.clone()));
        Element::from_blocks(&self.algebra, blocks).expect("shape of A ⊕ ℂ")
    }

    pub fn from_direct_sum(&self, y: &Element) -> UnitizedElement {
        assert_eq!(y.algebra(), self.algebra, "element outside A ⊕ ℂ");
        let m = self.base.num_blocks();
        let mu = y.block(m)[(0, 0)].clone();
        let head = Element::from_blocks(&self.base, y.blocks()[..m].to_vec()).expect("base blocks");
        UnitizedElement { a: &head - &Element::scalar(&self.base, mu.clone()), mu }
    }

    /// The ideal embedding `A → A ⊕ ℂ` as a (non-unital) *-homomorphism.
    pub fn ideal_embedding(&self) -> Inclusion {
        let images = self
            .base
            .units()
            .map(|u| self.to_direct_sum(&self.embed(&Element::matrix_unit(&self.base, u))))
            .collect();
        Inclusion::new(self.base.clone(), self.algebra.clone(), images).expect("images in A ⊕ ℂ")
    }
}

/// `ι^u(d, µ) = (ι(d), µ)` for `ι: D → A`, realized on `D ⊕ ℂ → A ⊕ ℂ`.
/// Unital even when `ι` is not, which is the point of the reduction.
pub fn unitize_inclusion(incl: &Inclusion) -> Inclusion {
    let du = unitize(incl.source());
    let au = unitize(incl.target());
    let images = du
        .algebra()
        .units()
        .map(|u| {
            let x = du.from_direct_sum(&Element::matrix_unit(du.algebra(), u));
            au.to_direct_sum(&au.pair(incl.apply(&x.a), x.mu))
        })
        .collect();
    Inclusion::new(du.algebra().clone(), au.algebra().clone(), images).expect("images in A ⊕ ℂ")
}

impl<'a> Mul<&'a UnitizedElement> for &'a UnitizedElement {
    type Output = UnitizedElement;
    fn mul(self, o: &UnitizedElement) -> UnitizedElement {
        let a = &(&(&self.a * &o.a) + &o.a.scale(&self.mu)) + &self.a.scale(&o.mu);
        UnitizedElement { a, mu: &self.mu * &o.mu }
    }
}

impl<'a> Add<&'a UnitizedElement> for &'a UnitizedElement {
    type Output = UnitizedElement;
    fn add(self, o: &UnitizedElement) -> UnitizedElement {
        UnitizedElement { a: &self.a + &o.a, mu: &self.mu + &o.mu }
    }
}

impl<'a> Sub<&'a UnitizedElement> for &'a UnitizedElement {
    type Output = UnitizedElement;
    fn sub(self, o: &UnitizedElement) -> UnitizedElement {
        UnitizedElement { a: &self.a - &o.a, mu: &self.mu - &o.mu }
    }
}

impl UnitizedElement {
    pub fn adjoint(&self) -> UnitizedElement {
        UnitizedElement { a: self.a.adjoint(), mu: self.mu.conj() }
    }

    pub fn scale(&self, c: &GaussRational) -> UnitizedElement {
        UnitizedElement { a: self.a.scale(c), mu: &self.mu * c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixUnit;

    #[test]
    fn unit_acts_as_identity() {
        let m2 = FdAlgebra::full(2);
        let u = unitize(&m2);
        let a = u.embed(&Element::matrix_unit(&m2, MatrixUnit::new(0, 0, 1)));
        assert_eq!(&u.unit() * &a, a);
        assert_eq!(&a * &u.unit(), a);
    }

    #[test]
    fn epsilon_is_a_character() {
        let m2 = FdAlgebra::full(2);
        let u = unitize(&m2);
        let x = u.pair(Element::matrix_unit(&m2, MatrixUnit::new(0, 1, 0)), GaussRational::from_int(3));
        let y = u.pair(Element::unit(&m2), GaussRational::new(fdca_exact::rat(1, 2), fdca_exact::rat_int(-1)));
        assert_eq!(u.epsilon(&(&x * &y)), u.epsilon(&x) * u.epsilon(&y));
        assert_eq!(u.epsilon(&u.unit()), GaussRational::one());
        assert!(u.epsilon(&u.embed(&Element::unit(&m2))).is_zero());
    }

    #[test]
    fn unitization_of_scalars_is_c2() {
        // Adapted basis: idempotents (1,0) and (-1,1) of ℂ^u.
        let c = FdAlgebra::full(1);
        let u = unitize(&c);
        assert_eq!(u.algebra(), &FdAlgebra::abelian(2));
        let p = u.embed(&Element::unit(&c));
        let q = &u.unit() - &p;
        assert_eq!(&p * &p, p);
        assert_eq!(&q * &q, q);
        assert!((&p * &q).a.is_zero() && (&p * &q).mu.is_zero());
        assert_eq!(u.to_direct_sum(&p), Element::block_unit(u.algebra(), 0));
        assert_eq!(u.to_direct_sum(&q), Element::block_unit(u.algebra(), 1));
        assert_eq!(u.epsilon(&q), GaussRational::one());
    }

    #[test]
    fn direct_sum_iso_is_multiplicative() {
        let a = FdAlgebra::new(vec![2, 1]).unwrap();
        let u = unitize(&a);
        let x = u.pair(
            Element::from_coords(&a, &(0..5).map(|k| GaussRational::from_int(k - 2)).collect::<Vec<_>>()),
            GaussRational::from_int(2),
        );
        let y = u.pair(Element::matrix_unit(&a, MatrixUnit::new(0, 1, 0)), GaussRational::i());
        assert_eq!(u.to_direct_sum(&(&x * &y)), &u.to_direct_sum(&x) * &u.to_direct_sum(&y));
        assert_eq!(u.from_direct_sum(&u.to_direct_sum(&x)), x);
        assert!(u.ideal_embedding().validate().failures.iter().all(|f| matches!(f, crate::inclusion::StarHomFailure::NotUnital)));
    }

    #[test]
    fn unitized_inclusion_from_zero_is_unital() {
        let z = FdAlgebra::zero_algebra();
        let m2 = FdAlgebra::full(2);
        let zero_map = Inclusion::new(z, m2, vec![]).unwrap();
        let iu = unitize_inclusion(&zero_map);
        assert!(iu.validate().is_ok());
        assert_eq!(iu.source(), &FdAlgebra::full(1));
    }
}
