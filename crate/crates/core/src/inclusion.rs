//! Unital *-homomorphisms between multi-matrix algebras, stored as the images
//! of the source's matrix units.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use fdca_exact::{GaussRational, RatMatrix};
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{Element, FdAlgebra, MatrixUnit};
use crate::error::AlgebraError;

#[derive(Clone, PartialEq, Eq)]
pub struct Inclusion {
    source: FdAlgebra,
    target: FdAlgebra,
    /// One image per source matrix unit, in canonical unit order.
    images: Vec<Element>,
}

impl fmt::Debug for Inclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Inclusion({:?} -> {:?})", self.source, self.target)
    }
}

impl Inclusion {
    pub fn new(source: FdAlgebra, target: FdAlgebra, images: Vec<Element>) -> Result<Self, AlgebraError> {
        if images.len() != source.dim() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} unit images for a source of dimension {}",
                images.len(),
                source.dim()
            )));
        }
        for (u, img) in source.units().zip(&images) {
            if img.algebra() != target {
                return Err(AlgebraError::ImageShape { unit: u });
            }
        }
        Ok(Inclusion { source, target, images })
    }

    pub fn identity(a: &FdAlgebra) -> Self {
        let images = a.units().map(|u| Element::matrix_unit(a, u)).collect();
        Inclusion { source: a.clone(), target: a.clone(), images }
    }

    /// The standard block-diagonal embedding realizing a multiplicity matrix.
    ///
    /// `mult[i][j]` copies of source block `j` are laid out along the diagonal
    /// of target block `i`, source blocks in order, copies adjacent.
    pub fn canonical(mult: &[Vec<usize>], source: &FdAlgebra, target: &FdAlgebra) -> Result<Self, AlgebraError> {
        let m = target.num_blocks();
        let n = source.num_blocks();
        if mult.len() != m || mult.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::DimensionMismatch(format!(
                "multiplicity matrix must be {m}x{n}"
            )));
        }
        for (i, row) in mult.iter().enumerate() {
            let size: usize = row.iter().zip(source.block_sizes()).map(|(c, s)| c * s).sum();
            if size != target.block_sizes()[i] {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "target block {i} has size {} but multiplicities fill {size}",
                    target.block_sizes()[i]
                )));
            }
        }
        if let Some(j) = (0..n).find(|&j| mult.iter().all(|row| row[j] == 0)) {
            return Err(AlgebraError::NotInjective { block: j });
        }
        // offsets[i][j] = list of diagonal offsets in target block i for copies of source block j
        let mut offsets = vec![vec![Vec::new(); n]; m];
        for (i, row) in mult.iter().enumerate() {
            let mut off = 0;
            for (j, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    offsets[i][j].push(off);
                    off += source.block_sizes()[j];
                }
            }
        }
        let images = source
            .units()
            .map(|u| {
                let mut e = Element::zero(target);
                let mut blocks: Vec<RatMatrix> = e.blocks().to_vec();
                for (i, offs) in offsets.iter().enumerate() {
                    for &o in &offs[u.block] {
                        blocks[i][(o + u.row, o + u.col)] = GaussRational::from_int(1);
                    }
                }
                e = Element::from_blocks(target, blocks).expect("shape preserved");
                e
            })
            .collect();
        Ok(Inclusion { source: source.clone(), target: target.clone(), images })
    }

    pub fn source(&self) -> &FdAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FdAlgebra {
        &self.target
    }

    pub fn unit_image(&self, u: MatrixUnit) -> &Element {
        &self.images[self.source.unit_index(u)]
    }

    pub fn images(&self) -> impl Iterator<Item = (MatrixUnit, &Element)> {
        self.source.units().zip(&self.images)
    }

    pub fn apply(&self, x: &Element) -> Element {
        assert_eq!(x.algebra(), self.source, "element is not in the inclusion's source");
        let mut out = Element::zero(&self.target);
        for (c, img) in x.coords().iter().zip(&self.images) {
            if !c.is_zero() {
                out = &out + &img.scale(c);
            }
        }
        out
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &Inclusion) -> Result<Inclusion, AlgebraError> {
        if outer.source != self.target {
            return Err(AlgebraError::Incompatible(format!(
                "cannot compose {:?} with {:?}",
                self, outer
            )));
        }
        let images = self.images.iter().map(|x| outer.apply(x)).collect();
        Ok(Inclusion { source: self.source.clone(), target: outer.target.clone(), images })
    }

    /// Matrix of the linear map in matrix-unit coordinates (`dim T × dim S`).
    pub fn linear_map(&self) -> RatMatrix {
        let cols: Vec<Vec<GaussRational>> = self.images.iter().map(Element::coords).collect();
        RatMatrix::from_fn(self.target.dim(), self.source.dim(), |i, j| cols[j][i].clone())
    }

    /// The unique preimage of `x`, when `x` lies in the image.
    pub fn preimage(&self, x: &Element) -> Option<Element> {
        if x.algebra() != self.target {
            return None;
        }
        if self.source.is_zero_algebra() {
            return x.is_zero().then(|| Element::zero(&self.source));
        }
        // Images of distinct matrix units are orthogonal for the unnormalized
        // trace, so projecting gives the preimage whenever there is one.
        let coeffs: Vec<GaussRational> = self
            .images
            .iter()
            .map(|img| {
                let s = Sparse::from_element(img);
                let mut num = GaussRational::zero();
                let mut den = GaussRational::zero();
                for (&(k, r, c), v) in &s.entries {
                    num += &(v.conj() * x.block(k)[(r, c)].clone());
                    den += &GaussRational::from_real(v.norm_sqr());
                }
                den.inv().map_or_else(GaussRational::zero, |d| num * d)
            })
            .collect();
        let candidate = Element::from_coords(&self.source, &coeffs);
        if self.apply(&candidate) == *x {
            return Some(candidate);
        }
        let (c, _) = self.linear_map().solve(&x.coords())?;
        Some(Element::from_coords(&self.source, &c))
    }

    /// Check unitality, multiplicativity and adjoint preservation on all
    /// matrix units, and injectivity on each block.
    pub fn validate(&self) -> StarHomReport {
        let mut failures = Vec::new();
        if !self.source.is_zero_algebra() {
            let one = self.apply(&Element::unit(&self.source));
            if one != Element::unit(&self.target) {
                failures.push(StarHomFailure::NotUnital);
            }
        }
        // Unit images are sparse; multiply them as entry lists.
        let sparse: Vec<Sparse> = self.images.iter().map(Sparse::from_element).collect();
        for (ui, u) in self.source.units().enumerate() {
            if sparse[ui].adjoint() != sparse[self.source.unit_index(u.adjoint())] {
                failures.push(StarHomFailure::NotAdjointPreserving { unit: u.id() });
            }
            for (vi, v) in self.source.units().enumerate() {
                let lhs = sparse[ui].mul(&sparse[vi]);
                let ok = match u.product(v) {
                    Some(w) => lhs == sparse[self.source.unit_index(w)],
                    None => lhs.entries.is_empty(),
                };
                if !ok {
                    failures.push(StarHomFailure::NotMultiplicative { left: u.id(), right: v.id() });
                }
            }
        }
        for k in 0..self.source.num_blocks() {
            if self.unit_image(MatrixUnit::new(k, 0, 0)).is_zero() {
                failures.push(StarHomFailure::NotInjective { block: k });
            }
        }
        StarHomReport { zero_source: self.source.is_zero_algebra(), failures }
    }

    /// Multiplicity matrix read off by ranks, without validation.
    pub(crate) fn block_ranks(&self, source_block: usize) -> Vec<usize> {
        let q = Element::block_unit(&self.source, source_block);
        let img = self.apply(&q);
        img.blocks().iter().map(RatMatrix::rank).collect()
    }
}

/// Nonzero entries `(block, row, col) → value` of an element.
#[derive(PartialEq, Eq)]
struct Sparse {
    entries: BTreeMap<(usize, usize, usize), GaussRational>,
    /// `(block, row) → [(col, value)]`
    rows: HashMap<(usize, usize), Vec<(usize, GaussRational)>>,
}

impl Sparse {
    fn from_entries(entries: BTreeMap<(usize, usize, usize), GaussRational>) -> Self {
        let mut rows: HashMap<(usize, usize), Vec<(usize, GaussRational)>> = HashMap::new();
        for ((k, r, c), v) in &entries {
            rows.entry((*k, *r)).or_default().push((*c, v.clone()));
        }
        Sparse { entries, rows }
    }

    fn from_element(x: &Element) -> Self {
        let mut entries = BTreeMap::new();
        for (k, b) in x.blocks().iter().enumerate() {
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    if !b[(r, c)].is_zero() {
                        entries.insert((k, r, c), b[(r, c)].clone());
                    }
                }
            }
        }
        Self::from_entries(entries)
    }

    fn adjoint(&self) -> Self {
        Self::from_entries(self.entries.iter().map(|(&(k, r, c), v)| ((k, c, r), v.conj())).collect())
    }

    fn mul(&self, o: &Sparse) -> Self {
        let mut out: BTreeMap<(usize, usize, usize), GaussRational> = BTreeMap::new();
        for (&(k, r, m), a) in &self.entries {
            if let Some(row) = o.rows.get(&(k, m)) {
                for (c, b) in row {
                    *out.entry((k, r, *c)).or_insert_with(GaussRational::zero) += &(a * b);
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Self::from_entries(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StarHomFailure {
    NotUnital,
    NotMultiplicative { left: String, right: String },
    NotAdjointPreserving { unit: String },
    NotInjective { block: usize },
}

/// Outcome of [`Inclusion::validate`]. An inclusion out of the zero algebra
/// is the zero map; unitality is not asked of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarHomReport {
    pub zero_source: bool,
    pub failures: Vec<StarHomFailure>,
}

impl StarHomReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fdca_exact::GaussRational as G;

    fn diag(alg: &FdAlgebra, entries: &[i64]) -> Element {
        let n = alg.block_sizes()[0];
        let m = RatMatrix::from_fn(n, n, |i, j| if i == j { G::from_int(entries[i]) } else { G::zero() });
        Element::from_blocks(alg, vec![m]).unwrap()
    }

    #[test]
    fn canonical_diag_c2_in_m2() {
        let d = FdAlgebra::abelian(2);
        let a = FdAlgebra::full(2);
        let inc = Inclusion::canonical(&[vec![1, 1]], &d, &a).unwrap();
        assert!(inc.validate().is_ok());
        let x = Element::from_coords(&d, &[G::from_int(5), G::from_int(7)]);
        assert_eq!(inc.apply(&x), diag(&a, &[5, 7]));
    }

    #[test]
    fn canonical_scalars_in_m2() {
        let d = FdAlgebra::full(1);
        let a = FdAlgebra::full(2);
        let inc = Inclusion::canonical(&[vec![2]], &d, &a).unwrap();
        assert!(inc.validate().is_ok());
        assert_eq!(inc.apply(&Element::unit(&d)), Element::unit(&a));
    }

    #[test]
    fn canonical_with_repeated_block() {
        let d = FdAlgebra::abelian(2);
        let a = FdAlgebra::full(3);
        let inc = Inclusion::canonical(&[vec![1, 2]], &d, &a).unwrap();
        assert!(inc.validate().is_ok());
        let x = Element::from_coords(&d, &[G::from_int(2), G::from_int(-1)]);
        assert_eq!(inc.apply(&x), diag(&a, &[2, -1, -1]));
    }

    #[test]
    fn canonical_rejects_bad_bookkeeping() {
        let d = FdAlgebra::abelian(2);
        let a = FdAlgebra::full(3);
        assert!(matches!(
            Inclusion::canonical(&[vec![1, 1]], &d, &a),
            Err(AlgebraError::DimensionMismatch(_))
        ));
        assert!(matches!(
            Inclusion::canonical(&[vec![3, 0]], &d, &a),
            Err(AlgebraError::NotInjective { block: 1 })
        ));
    }

    #[test]
    fn validation_catches_non_unital_and_non_injective() {
        // C -> M2 sending 1 to e11
        let c = FdAlgebra::full(1);
        let m2 = FdAlgebra::full(2);
        let e11 = Element::matrix_unit(&m2, MatrixUnit::new(0, 0, 0));
        let corner = Inclusion::new(c.clone(), m2.clone(), vec![e11]).unwrap();
        assert!(corner.validate().failures.contains(&StarHomFailure::NotUnital));

        // C^2 -> M2 killing the second block
        let c2 = FdAlgebra::abelian(2);
        let killer = Inclusion::new(
            c2,
            m2.clone(),
            vec![Element::unit(&m2), Element::zero(&m2)],
        )
        .unwrap();
        let r = killer.validate();
        assert!(r.failures.contains(&StarHomFailure::NotInjective { block: 1 }));
    }

    #[test]
    fn preimage_round_trip() {
        let d = FdAlgebra::abelian(2);
        let a = FdAlgebra::full(3);
        let inc = Inclusion::canonical(&[vec![1, 2]], &d, &a).unwrap();
        assert_eq!(inc.preimage(&Element::unit(&a)), Some(Element::unit(&d)));
        let x = Element::from_coords(&d, &[G::new(fdca_exact::rat(1, 3), fdca_exact::rat_int(2)), G::from_int(-4)]);
        assert_eq!(inc.preimage(&inc.apply(&x)), Some(x));
        let off = Element::matrix_unit(&a, MatrixUnit::new(0, 0, 1));
        assert_eq!(inc.preimage(&off), None);
    }

    #[test]
    fn composition() {
        let c = FdAlgebra::full(1);
        let m2 = FdAlgebra::full(2);
        let m4 = FdAlgebra::full(4);
        let i1 = Inclusion::canonical(&[vec![2]], &c, &m2).unwrap();
        let i2 = Inclusion::canonical(&[vec![2]], &m2, &m4).unwrap();
        let comp = i1.then(&i2).unwrap();
        assert_eq!(comp, Inclusion::canonical(&[vec![4]], &c, &m4).unwrap());
        assert!(i2.then(&i1).is_err());
    }
}
