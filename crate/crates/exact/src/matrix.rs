//! Dense matrices over ℚ(i) and the row-reduction routines built on them.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::scalar::{GaussRational, Rational};
use crate::LinalgError;

/// Row-major dense matrix of Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![GaussRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GaussRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<GaussRational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Ragged);
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from small integers; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r: Vec<Vec<GaussRational>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| GaussRational::from_int(x)).collect())
            .collect();
        Self::from_rows(r).expect("ragged integer matrix")
    }

    pub fn from_rationals(rows: usize, cols: usize, entries: &[Rational]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        RatMatrix {
            rows,
            cols,
            data: entries.iter().cloned().map(GaussRational::from_real).collect(),
        }
    }

    pub fn column(v: &[GaussRational]) -> Self {
        RatMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[GaussRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[GaussRational] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<GaussRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(GaussRational::is_real)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> GaussRational {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| &self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[GaussRational]) -> Vec<GaussRational> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn checked_mul(&self, o: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (o.rows, o.cols),
            });
        }
        let mut out = RatMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | o]`.
    pub fn hstack(&self, o: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.rows != o.rows {
            return Err(LinalgError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (o.rows, o.cols),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        }))
    }

    /// Reduced row-echelon form and the pivot columns, in increasing order.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let d = &f * &m[(r, j)];
                    m[(i, j)] -= &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact basis of `{x : Mx = 0}`, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<Vec<GaussRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![GaussRational::zero(); self.cols];
                x[f] = GaussRational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    x[pc] = -&r[(row, f)];
                }
                x
            })
            .collect()
    }

    /// Solve `Mx = b`. Returns `None` when inconsistent; otherwise the solution
    /// with all free variables set to zero, and whether it is unique.
    pub fn solve(&self, b: &[GaussRational]) -> Option<(Vec<GaussRational>, bool)> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let aug = self.hstack(&RatMatrix::column(b)).expect("rows match");
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![GaussRational::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some((x, pivots.len() == self.cols))
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n)).expect("square");
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = GaussRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussRational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussRational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn mul(self, o: &RatMatrix) -> RatMatrix {
        self.checked_mul(o).expect("matrix product shape mismatch")
    }
}

impl<'a> Add<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn add(self, o: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn sub(self, o: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

/// Serialized as row-major nested lists.
impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<GaussRational>>::deserialize(d)?;
        RatMatrix::from_rows(rows).map_err(de::Error::custom)
    }
}
