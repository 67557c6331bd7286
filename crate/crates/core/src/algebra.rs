//! Multi-matrix algebras `M_{n₁} ⊕ … ⊕ M_{n_m}` and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use fdca_exact::{GaussRational, RatMatrix};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// A finite direct sum of full matrix algebras, described by its block sizes.
///
/// The empty block list is the zero algebra.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct FdAlgebra {
    blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraRepr {
    blocks: Vec<usize>,
}

impl TryFrom<AlgebraRepr> for FdAlgebra {
    type Error = AlgebraError;
    fn try_from(r: AlgebraRepr) -> Result<Self, AlgebraError> {
        FdAlgebra::new(r.blocks)
    }
}

impl From<FdAlgebra> for AlgebraRepr {
    fn from(a: FdAlgebra) -> Self {
        AlgebraRepr { blocks: a.blocks }
    }
}

/// Matrix unit `e_{row,col}` inside block `block`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl MatrixUnit {
    pub fn new(block: usize, row: usize, col: usize) -> Self {
        MatrixUnit { block, row, col }
    }

    pub fn adjoint(self) -> Self {
        MatrixUnit { block: self.block, row: self.col, col: self.row }
    }

    /// `e_{ij} e_{kl} = δ_{jk} e_{il}` within one block, zero across blocks.
    pub fn product(self, o: MatrixUnit) -> Option<MatrixUnit> {
        (self.block == o.block && self.col == o.row).then(|| MatrixUnit::new(self.block, self.row, o.col))
    }

    /// Text id `"k,i,j"` used in serialized inclusions.
    pub fn id(&self) -> String {
        format!("{},{},{}", self.block, self.row, self.col)
    }

    pub fn parse_id(s: &str) -> Option<Self> {
        let mut it = s.split(',').map(|p| p.trim().parse::<usize>());
        let (Some(Ok(k)), Some(Ok(i)), Some(Ok(j)), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return None;
        };
        Some(MatrixUnit::new(k, i, j))
    }
}

impl fmt::Display for MatrixUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{}]({},{})", self.block, self.row, self.col)
    }
}

impl FdAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self, AlgebraError> {
        if let Some(pos) = blocks.iter().position(|&n| n == 0) {
            return Err(AlgebraError::InvalidBlockSize { index: pos });
        }
        Ok(FdAlgebra { blocks })
    }

    /// `M_n`.
    pub fn full(n: usize) -> Self {
        FdAlgebra::new(vec![n]).expect("positive size")
    }

    /// `ℂ^k` as diagonal scalars.
    pub fn abelian(k: usize) -> Self {
        FdAlgebra { blocks: vec![1; k] }
    }

    pub fn zero_algebra() -> Self {
        FdAlgebra { blocks: Vec::new() }
    }

    pub fn is_zero_algebra(&self) -> bool {
        self.blocks.is_empty()
    }

    /// True for `ℂ` (a single 1×1 block).
    pub fn is_scalars(&self) -> bool {
        self.blocks == [1]
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Linear dimension `Σ nᵢ²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Size of the block-diagonal matrix realization, `Σ nᵢ`.
    pub fn matrix_size(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Matrix units in canonical order: by block, then row, then column.
    pub fn units(&self) -> impl Iterator<Item = MatrixUnit> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| (0..n).flat_map(move |i| (0..n).map(move |j| MatrixUnit::new(k, i, j))))
    }

    pub fn unit_index(&self, u: MatrixUnit) -> usize {
        assert!(u.block < self.blocks.len(), "block {} out of range", u.block);
        let n = self.blocks[u.block];
        assert!(u.row < n && u.col < n, "matrix unit {u} out of range");
        let offset: usize = self.blocks[..u.block].iter().map(|m| m * m).sum();
        offset + u.row * n + u.col
    }

    pub fn contains_unit(&self, u: MatrixUnit) -> bool {
        u.block < self.blocks.len() && u.row < self.blocks[u.block] && u.col < self.blocks[u.block]
    }

    /// Direct sum `self ⊕ other` (blocks concatenated).
    pub fn direct_sum(&self, other: &FdAlgebra) -> FdAlgebra {
        FdAlgebra { blocks: self.blocks.iter().chain(&other.blocks).copied().collect() }
    }

    /// Default faithful tracial weights `sᵢ = nᵢ / Σⱼ nⱼ²`.
    pub fn default_trace_weights(&self) -> Vec<fdca_exact::Rational> {
        let total = self.dim() as i64;
        self.blocks.iter().map(|&n| fdca_exact::rat(n as i64, total)).collect()
    }
}

impl fmt::Debug for FdAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|&n| if n == 1 { "C".to_string() } else { format!("M{n}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// An element of a multi-matrix algebra: one square matrix per block.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    blocks: Vec<RatMatrix>,
}

impl Element {
    pub fn from_blocks(algebra: &FdAlgebra, blocks: Vec<RatMatrix>) -> Result<Self, AlgebraError> {
        if blocks.len() != algebra.num_blocks() {
            return Err(AlgebraError::ElementShape(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (b, &n)) in blocks.iter().zip(algebra.block_sizes()).enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(AlgebraError::ElementShape(format!(
                    "block {k} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(Element { blocks })
    }

    pub fn zero(algebra: &FdAlgebra) -> Self {
        Element { blocks: algebra.block_sizes().iter().map(|&n| RatMatrix::zeros(n, n)).collect() }
    }

    pub fn unit(algebra: &FdAlgebra) -> Self {
        Element { blocks: algebra.block_sizes().iter().map(|&n| RatMatrix::identity(n)).collect() }
    }

    pub fn matrix_unit(algebra: &FdAlgebra, u: MatrixUnit) -> Self {
        let mut e = Self::zero(algebra);
        e.blocks[u.block][(u.row, u.col)] = GaussRational::one();
        e
    }

    /// Unit of block `k`: the k-th minimal central projection.
    pub fn block_unit(algebra: &FdAlgebra, k: usize) -> Self {
        let mut e = Self::zero(algebra);
        e.blocks[k] = RatMatrix::identity(algebra.block_sizes()[k]);
        e
    }

    pub fn scalar(algebra: &FdAlgebra, c: GaussRational) -> Self {
        Self::unit(algebra).scale(&c)
    }

    pub fn algebra(&self) -> FdAlgebra {
        FdAlgebra { blocks: self.blocks.iter().map(RatMatrix::rows).collect() }
    }

    pub fn blocks(&self) -> &[RatMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &RatMatrix {
        &self.blocks[k]
    }

    pub fn entry(&self, u: MatrixUnit) -> &GaussRational {
        &self.blocks[u.block][(u.row, u.col)]
    }

    /// Coordinates in the matrix-unit basis, in canonical unit order.
    pub fn coords(&self) -> Vec<GaussRational> {
        self.blocks.iter().flat_map(|b| b.entries().iter().cloned()).collect()
    }

    pub fn from_coords(algebra: &FdAlgebra, coords: &[GaussRational]) -> Self {
        assert_eq!(coords.len(), algebra.dim(), "coordinate vector length");
        let mut off = 0;
        let blocks = algebra
            .block_sizes()
            .iter()
            .map(|&n| {
                let b = RatMatrix::from_fn(n, n, |i, j| coords[off + i * n + j].clone());
                off += n * n;
                b
            })
            .collect();
        Element { blocks }
    }

    pub fn adjoint(&self) -> Self {
        Element { blocks: self.blocks.iter().map(RatMatrix::adjoint).collect() }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Element { blocks: self.blocks.iter().map(|b| b.scale(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(RatMatrix::is_zero)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.blocks.iter().all(RatMatrix::is_self_adjoint)
    }

    /// Block-diagonal matrix realization of size `Σ nᵢ`.
    pub fn to_block_diagonal(&self) -> RatMatrix {
        let n: usize = self.blocks.iter().map(RatMatrix::rows).sum();
        let mut m = RatMatrix::zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    m[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows();
        }
        m
    }

    /// `c` with `self = c·1`, if `self` is a scalar multiple of the unit.
    pub fn as_scalar(&self) -> Option<GaussRational> {
        let alg = self.algebra();
        if alg.is_zero_algebra() {
            return Some(GaussRational::zero());
        }
        let c = self.blocks[0][(0, 0)].clone();
        (*self == Element::scalar(&alg, c.clone())).then_some(c)
    }

    fn assert_same_shape(&self, o: &Element) {
        assert!(
            self.blocks.len() == o.blocks.len()
                && self.blocks.iter().zip(&o.blocks).all(|(a, b)| a.rows() == b.rows()),
            "elements of different algebras: {:?} vs {:?}",
            self.algebra(),
            o.algebra()
        );
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element(")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "{b:?}")?;
        }
        write!(f, ")")
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, o: &Element) -> Element {
        self.assert_same_shape(o);
        Element { blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a * b).collect() }
    }
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        self.assert_same_shape(o);
        Element { blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, o: &Element) -> Element {
        self.assert_same_shape(o);
        Element { blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element { blocks: self.blocks.iter().map(|b| -b).collect() }
    }
}

/// The minimal central projections `p₁, …, p_m` (block units).
pub fn minimal_central_projections(a: &FdAlgebra) -> Vec<Element> {
    (0..a.num_blocks()).map(|k| Element::block_unit(a, k)).collect()
}
