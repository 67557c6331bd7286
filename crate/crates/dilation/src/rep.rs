//! Floating-point representations of multi-matrix algebras and the small
//! amount of dense linear algebra the constructions need.

use fdca::{Element, FdAlgebra, Inclusion, MatrixUnit};
use fdca_exact::{GaussRational, RatMatrix};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

use crate::DilationError;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn to_c64(z: &GaussRational) -> Complex64 {
    let (re, im) = z.to_f64_pair();
    Complex64::new(re, im)
}

pub fn to_cmat(m: &RatMatrix) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| to_c64(&m[(i, j)]))
}

/// Frobenius norm; an upper bound for the operator norm.
pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

/// A `*`-representation of `algebra` on `ℂ^dim`, stored as the images of
/// the matrix units in unit order.
#[derive(Clone, Debug)]
pub struct Representation {
    algebra: FdAlgebra,
    dim: usize,
    images: Vec<CMat>,
}

impl Representation {
    pub fn new(algebra: &FdAlgebra, dim: usize, images: Vec<CMat>) -> Result<Self, DilationError> {
        if images.len() != algebra.dim() {
            return Err(DilationError::Shape(format!(
                "{} unit images for an algebra of dimension {}",
                images.len(),
                algebra.dim()
            )));
        }
        if let Some(m) = images.iter().find(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(DilationError::Shape(format!(
                "image of shape {}x{} on a space of dimension {dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Representation { algebra: algebra.clone(), dim, images })
    }

    /// The identity representation of `M_h` restricted along `incl`.
    pub fn from_inclusion(incl: &Inclusion) -> Result<Self, DilationError> {
        let t = incl.target();
        if t.num_blocks() != 1 {
            return Err(DilationError::Shape(format!(
                "representations are inclusions into a single full matrix algebra, got blocks {:?}",
                t.block_sizes()
            )));
        }
        let images = incl.images().map(|(_, e)| to_cmat(e.block(0))).collect();
        Self::new(incl.source(), t.block_sizes()[0], images)
    }

    /// The zero space carries the (non-unital) zero representation.
    pub fn zero(algebra: &FdAlgebra) -> Self {
        Representation { algebra: algebra.clone(), dim: 0, images: vec![CMat::zeros(0, 0); algebra.dim()] }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn images(&self) -> &[CMat] {
        &self.images
    }

    pub fn image(&self, u: MatrixUnit) -> &CMat {
        &self.images[self.algebra.unit_index(u)]
    }

    pub fn apply(&self, x: &Element) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (c, m) in x.coords().iter().zip(&self.images) {
            if !c.is_zero() {
                out += m * to_c64(c);
            }
        }
        out
    }

    /// `π∘ι` for `ι: C → algebra`.
    pub fn restrict(&self, incl: &Inclusion) -> Result<Representation, DilationError> {
        if incl.target() != &self.algebra {
            return Err(DilationError::Shape("restriction along an inclusion into another algebra".into()));
        }
        let images = incl.images().map(|(_, e)| self.apply(e)).collect();
        Representation::new(incl.source(), self.dim, images)
    }

    /// `π∘ι` with `ι` given as a float map.
    pub fn pullback(&self, map: &FloatMap) -> Representation {
        let images = map
            .terms
            .iter()
            .map(|ts| {
                let mut m = CMat::zeros(self.dim, self.dim);
                for &(i, c) in ts {
                    m += &self.images[i] * c;
                }
                m
            })
            .collect();
        Representation { algebra: map.source.clone(), dim: self.dim, images }
    }

    /// `W* π(·) W` for an isometry `W: ℂ^m → ℂ^dim`.
    pub fn conjugate(&self, w: &CMat) -> Representation {
        let wa = w.adjoint();
        Representation {
            algebra: self.algebra.clone(),
            dim: w.ncols(),
            images: self.images.iter().map(|m| &wa * m * w).collect(),
        }
    }

    /// Compression to the coordinate range `start..start+len`.
    pub fn compress(&self, start: usize, len: usize) -> Representation {
        Representation {
            algebra: self.algebra.clone(),
            dim: len,
            images: self.images.iter().map(|m| m.view((start, start), (len, len)).into_owned()).collect(),
        }
    }

    /// Largest leakage `‖(1−P)π(eᵤ)P‖` out of the coordinate range.
    pub fn leakage(&self, start: usize, len: usize) -> f64 {
        self.images
            .iter()
            .map(|m| {
                let mut col = m.columns(start, len).into_owned();
                col.rows_mut(start, len).fill(Complex64::zero());
                fro(&col)
            })
            .fold(0.0, f64::max)
    }

    pub fn unit_residual(&self) -> f64 {
        let mut one = CMat::zeros(self.dim, self.dim);
        for k in 0..self.algebra.num_blocks() {
            for i in 0..self.algebra.block_sizes()[k] {
                one += self.image(MatrixUnit::new(k, i, i));
            }
        }
        fro(&(one - CMat::identity(self.dim, self.dim)))
    }

    /// Maximum over matrix units of the multiplicativity, adjoint and unit
    /// defects.
    pub fn star_hom_residual(&self) -> f64 {
        let mut worst = self.unit_residual();
        for u in self.algebra.units() {
            let pu = self.image(u);
            worst = worst.max(fro(&(pu.adjoint() - self.image(u.adjoint()))));
            for k in 0..self.algebra.num_blocks() {
                for r in 0..self.algebra.block_sizes()[k] {
                    for c in 0..self.algebra.block_sizes()[k] {
                        let v = MatrixUnit::new(k, r, c);
                        let prod = pu * self.image(v);
                        let want = match u.product(v) {
                            Some(w) => prod - self.image(w),
                            None => prod,
                        };
                        worst = worst.max(fro(&want));
                    }
                }
            }
        }
        worst
    }

    /// Direct sum with `other` placed after `self`.
    pub fn direct_sum(&self, other: &Representation) -> Representation {
        let dim = self.dim + other.dim;
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(x, y)| {
                let mut m = CMat::zeros(dim, dim);
                m.view_mut((0, 0), (self.dim, self.dim)).copy_from(x);
                m.view_mut((self.dim, self.dim), (other.dim, other.dim)).copy_from(y);
                m
            })
            .collect();
        Representation { algebra: self.algebra.clone(), dim, images }
    }
}

/// An exact inclusion as sparse floating coefficient lists: the image of
/// source unit `u` is `Σ c·e_i` over `terms[u]`.
#[derive(Clone, Debug)]
pub struct FloatMap {
    pub source: FdAlgebra,
    pub terms: Vec<Vec<(usize, Complex64)>>,
}

impl FloatMap {
    pub fn new(incl: &Inclusion) -> Self {
        let terms = incl
            .images()
            .map(|(_, e)| {
                e.coords().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, to_c64(c))).collect()
            })
            .collect();
        FloatMap { source: incl.source().clone(), terms }
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass, appending the
/// columns of `cands` that are not in the span of `basis` (threshold on
/// the residual norm).
pub fn extend_orthonormal(basis: &mut Vec<CVec>, cands: impl IntoIterator<Item = CVec>, tol: f64) {
    for mut v in cands {
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let n = v.norm();
        if n > tol {
            basis.push(v / Complex64::new(n, 0.0));
        }
    }
}

pub fn columns_to_mat(rows: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Orthonormal basis of the orthogonal complement of the range of the
/// isometry `v` (columns in deterministic standard-basis order).
pub fn complement(v: &CMat) -> CMat {
    let n = v.nrows();
    let mut basis: Vec<CVec> = v.column_iter().map(|c| c.into_owned()).collect();
    let start = basis.len();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        extend_orthonormal(&mut basis, std::iter::once(CVec::from_fn(n, |r, _| unit_at(r, i))), 1e-6);
    }
    columns_to_mat(n, &basis[start..])
}

fn unit_at(r: usize, i: usize) -> Complex64 {
    if r == i {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::zero()
    }
}

/// `[a | b]`.
pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}

/// `‖V*V − 1‖`.
pub fn isometry_defect(v: &CMat) -> f64 {
    fro(&(v.adjoint() * v - CMat::identity(v.ncols(), v.ncols())))
}

/// Separation quotient of a positive semidefinite Gram matrix `G = [⟨xᵢ,xⱼ⟩]`:
/// `coords` sends coefficient vectors to an orthonormal frame of the
/// quotient, `lift` is its right inverse on that frame.
pub struct Quotient {
    pub coords: CMat,
    pub lift: CMat,
}

impl Quotient {
    /// Eigenvalues below `rel · λ_max` are treated as kernel; a most
    /// negative eigenvalue below `-neg_tol · max(1, λ_max)` is reported.
    pub fn of_gram(g: &CMat, rel: f64, neg_tol: f64) -> Result<Quotient, f64> {
        let n = g.nrows();
        if n == 0 {
            return Ok(Quotient { coords: CMat::zeros(0, 0), lift: CMat::zeros(0, 0) });
        }
        let h = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -neg_tol * max.max(1.0) {
            return Err(min);
        }
        let mut keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > rel * max).collect();
        keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let r = keep.len();
        let mut coords = CMat::zeros(r, n);
        let mut lift = CMat::zeros(n, r);
        for (k, &i) in keep.iter().enumerate() {
            let s = eig.eigenvalues[i].sqrt();
            let v = eig.eigenvectors.column(i);
            for j in 0..n {
                coords[(k, j)] = v[j].conj() * s;
                lift[(j, k)] = v[j] / s;
            }
        }
        Ok(Quotient { coords, lift })
    }

    pub fn dim(&self) -> usize {
        self.coords.nrows()
    }

    /// Operator induced on the quotient by a coefficient-space map `l`.
    pub fn induced(&self, l: &CMat) -> CMat {
        &self.coords * l * &self.lift
    }
}

/// Left multiplication by a matrix unit `w` on matrix-unit coordinates.
pub fn left_mult(a: &FdAlgebra, w: MatrixUnit) -> CMat {
    let n = a.dim();
    let mut m = CMat::zeros(n, n);
    let size = a.block_sizes()[w.block];
    for c in 0..size {
        let v = MatrixUnit::new(w.block, w.col, c);
        let out = MatrixUnit::new(w.block, w.row, c);
        m[(a.unit_index(out), a.unit_index(v))] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn unit_coords(a: &FdAlgebra) -> CVec {
    let one = Element::unit(a);
    CVec::from_iterator(a.dim(), one.coords().iter().map(to_c64))
}
