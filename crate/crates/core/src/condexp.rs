//! Trace-preserving conditional expectations onto unital subalgebras.

use fdca_exact::{GaussRational, RatMatrix};
use num_traits::Zero;

use crate::algebra::{Element, MatrixUnit};
use crate::error::AlgebraError;
use crate::inclusion::Inclusion;
use crate::trace::Trace;

/// `E: A → ι(D)`, the `τ`-orthogonal projection onto the image of `ι`.
///
/// Stored as the matrix taking ambient matrix-unit coordinates to
/// coordinates in the subalgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondExp {
    incl: Inclusion,
    trace: Trace,
    matrix: RatMatrix,
}

impl CondExp {
    /// With `fᵢⱼᵏ = ι(eᵢⱼᵏ)`, `E(x) = Σ τ(fⱼᵢᵏ x) / τ(fⱼⱼᵏ) · fᵢⱼᵏ`.
    pub fn trace_preserving(incl: &Inclusion, trace: &Trace) -> Result<Self, AlgebraError> {
        let amb = incl.target();
        if trace.algebra() != amb {
            return Err(AlgebraError::Incompatible(format!(
                "trace lives on {:?}, inclusion target is {:?}",
                trace.algebra(),
                amb
            )));
        }
        if !trace.is_faithful() {
            return Err(AlgebraError::NonFaithfulTrace);
        }
        let sub = incl.source();
        let s = trace.weights();
        let block_weight: Vec<GaussRational> = (0..sub.num_blocks())
            .map(|k| trace.apply(incl.unit_image(MatrixUnit::new(k, 0, 0))))
            .collect();
        let mut matrix = RatMatrix::zeros(sub.dim(), amb.dim());
        for (row, u) in sub.units().enumerate() {
            let f = incl.unit_image(u.adjoint());
            let inv = block_weight[u.block].inv().expect("faithful trace on a nonzero projection");
            for (col, v) in amb.units().enumerate() {
                // τ(f·e_v) = s_b · f_b[c][r]
                let fe = &f.block(v.block)[(v.col, v.row)];
                if !fe.is_zero() {
                    matrix[(row, col)] = fe * &GaussRational::from_real(s[v.block].clone()) * &inv;
                }
            }
        }
        Ok(CondExp { incl: incl.clone(), trace: trace.clone(), matrix })
    }

    /// Default-trace expectation.
    pub fn canonical(incl: &Inclusion) -> Self {
        Self::trace_preserving(incl, &Trace::default_for(incl.target())).expect("default trace is faithful")
    }

    pub fn inclusion(&self) -> &Inclusion {
        &self.incl
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Matrix of `x ↦ ι⁻¹(E(x))` in matrix-unit coordinates.
    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// `ι⁻¹(E(x))`, an element of the subalgebra.
    pub fn project(&self, x: &Element) -> Element {
        assert_eq!(x.algebra(), *self.incl.target(), "expectation applied outside its ambient");
        Element::from_coords(self.incl.source(), &self.matrix.mul_vec(&x.coords()))
    }

    /// `E(x)` in the ambient algebra.
    pub fn apply(&self, x: &Element) -> Element {
        self.incl.apply(&self.project(x))
    }

    /// `E(x*y)` is a positive-definite D-valued form iff the Gram matrix
    /// `τ_D(E(eᵤ* e_v))` over the ambient basis has full rank.
    pub fn is_faithful(&self) -> bool {
        let amb = self.incl.target();
        let sub_trace = Trace::new(
            self.incl.source(),
            (0..self.incl.source().num_blocks()).map(|_| fdca_exact::rat_int(1)).collect(),
        )
        .expect("one weight per block");
        let units: Vec<Element> = amb.units().map(|u| Element::matrix_unit(amb, u)).collect();
        let g = RatMatrix::from_fn(units.len(), units.len(), |i, j| {
            sub_trace.apply(&self.project(&(&units[i].adjoint() * &units[j])))
        });
        g.rank() == units.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FdAlgebra;
    use fdca_exact::{is_psd, rat};

    /// Orthogonal projection computed from scratch: solve the Gram system
    /// `⟨ι(eᵤ), ι(e_v)⟩ c = ⟨ι(eᵤ), x⟩`.
    fn gram_oracle(incl: &Inclusion, trace: &Trace, x: &Element) -> Element {
        let imgs: Vec<&Element> = incl.images().map(|(_, e)| e).collect();
        let n = imgs.len();
        let gram = RatMatrix::from_fn(n, n, |i, j| trace.apply(&(&imgs[i].adjoint() * imgs[j])));
        let rhs: Vec<GaussRational> = imgs.iter().map(|e| trace.apply(&(&e.adjoint() * x))).collect();
        let (c, unique) = gram.solve(&rhs).expect("Gram system is consistent");
        assert!(unique);
        incl.apply(&Element::from_coords(incl.source(), &c))
    }

    #[test]
    fn scalars_in_m2() {
        let c = FdAlgebra::full(1);
        let m2 = FdAlgebra::full(2);
        let inc = Inclusion::canonical(&[vec![2]], &c, &m2).unwrap();
        let e = CondExp::trace_preserving(&inc, &Trace::normalized_full(2)).unwrap();
        let e11 = Element::matrix_unit(&m2, MatrixUnit::new(0, 0, 0));
        assert_eq!(e.apply(&e11), Element::scalar(&m2, GaussRational::from_ratio(1, 2)));
    }

    #[test]
    fn diagonal_in_m2_matches_gram_oracle() {
        let d = FdAlgebra::abelian(2);
        let m2 = FdAlgebra::full(2);
        let inc = Inclusion::canonical(&[vec![1, 1]], &d, &m2).unwrap();
        let t = Trace::normalized_full(2);
        let e = CondExp::trace_preserving(&inc, &t).unwrap();
        let x = Element::from_blocks(&m2, vec![RatMatrix::from_i64(&[&[1, 2], &[3, 4]])]).unwrap();
        assert_eq!(e.apply(&x), Element::from_blocks(&m2, vec![RatMatrix::from_i64(&[&[1, 0], &[0, 4]])]).unwrap());
        for u in m2.units() {
            let x = Element::matrix_unit(&m2, u);
            assert_eq!(e.apply(&x), gram_oracle(&inc, &t, &x));
        }
    }

    #[test]
    fn laws_on_a_non_factor_inclusion() {
        let d = FdAlgebra::new(vec![1, 2]).unwrap();
        let a = FdAlgebra::new(vec![3, 4]).unwrap();
        let inc = Inclusion::canonical(&[vec![1, 1], vec![2, 1]], &d, &a).unwrap();
        let t = Trace::new(&a, vec![rat(1, 7), rat(1, 5)]).unwrap();
        let e = CondExp::trace_preserving(&inc, &t).unwrap();
        let d_units: Vec<Element> = d.units().map(|u| inc.apply(&Element::matrix_unit(&d, u))).collect();
        for u in a.units() {
            let x = Element::matrix_unit(&a, u);
            let ex = e.apply(&x);
            assert_eq!(ex, gram_oracle(&inc, &t, &x));
            assert_eq!(t.apply(&ex), t.apply(&x));
            assert_eq!(e.apply(&ex), ex);
            for p in &d_units {
                for q in &d_units {
                    assert_eq!(e.apply(&(&(p * &x) * q)), &(p * &ex) * q);
                }
            }
        }
        for u in d.units() {
            let y = Element::matrix_unit(&d, u);
            assert_eq!(e.project(&inc.apply(&y)), y);
        }
        assert!(e.is_faithful());
    }

    #[test]
    fn positive_on_a_square() {
        let d = FdAlgebra::abelian(2);
        let m3 = FdAlgebra::full(3);
        let inc = Inclusion::canonical(&[vec![1, 2]], &d, &m3).unwrap();
        let e = CondExp::canonical(&inc);
        let z = Element::from_blocks(
            &m3,
            vec![RatMatrix::from_fn(3, 3, |i, j| GaussRational::new(rat((i * 3 + j) as i64 - 4, 1), rat(j as i64, 2)))],
        )
        .unwrap();
        let pz = e.project(&(&z.adjoint() * &z));
        assert!(pz.blocks().iter().all(|b| is_psd(b).unwrap()));
    }

    #[test]
    fn rejects_non_faithful_trace() {
        let c = FdAlgebra::full(1);
        let a = FdAlgebra::new(vec![1, 1]).unwrap();
        let inc = Inclusion::canonical(&[vec![1], vec![1]], &c, &a).unwrap();
        let t = Trace::new(&a, vec![rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(CondExp::trace_preserving(&inc, &t), Err(AlgebraError::NonFaithfulTrace));
    }
}
