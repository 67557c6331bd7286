//! Strictly positive null vectors of homogeneous rational systems, decided by
//! an exact phase-one simplex with Bland's rule.
//!
//! Because `Mx = 0` is homogeneous, a strictly positive solution exists iff
//! `{Mx = 0, x ≥ 1}` is feasible. Substituting `x = 1 + z` gives the standard
//! form `Mz = -M·1, z ≥ 0`, which phase one either solves or refutes. A
//! refutation comes with a Stiemke vector `y`: `Mᵀy ≥ 0` and `Mᵀy ≠ 0`, read
//! off the optimal phase-one duals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::RatMatrix;
use crate::scalar::{rational_vec, Rational};
use crate::LinalgError;

/// Dual witness that no strictly positive null vector exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StiemkeCertificate {
    #[serde(with = "rational_vec")]
    pub y: Vec<Rational>,
}

impl StiemkeCertificate {
    /// `Mᵀy`, computed exactly.
    pub fn image(&self, m: &[Vec<Rational>]) -> Vec<Rational> {
        let cols = m.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| m.iter().zip(&self.y).map(|(row, y)| &row[j] * y).sum())
            .collect()
    }

    /// Checks `Mᵀy ≥ 0` componentwise and `Mᵀy ≠ 0`.
    pub fn verify(&self, m: &RatMatrix) -> bool {
        let Ok(real) = real_rows(m) else { return false };
        if self.y.len() != m.rows() {
            return false;
        }
        let img = self.image(&real);
        img.iter().all(|v| !v.is_negative()) && img.iter().any(|v| !v.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositiveNullOutcome {
    /// `Mx = 0` with every component strictly positive.
    Positive(Vec<Rational>),
    Infeasible(StiemkeCertificate),
}

impl PositiveNullOutcome {
    /// Re-check whichever witness is carried against `m`.
    pub fn verify(&self, m: &RatMatrix) -> bool {
        match self {
            PositiveNullOutcome::Positive(x) => {
                let Ok(rows) = real_rows(m) else { return false };
                x.len() == m.cols()
                    && x.iter().all(Signed::is_positive)
                    && rows.iter().all(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>().is_zero())
            }
            PositiveNullOutcome::Infeasible(c) => c.verify(m),
        }
    }
}

fn real_rows(m: &RatMatrix) -> Result<Vec<Vec<Rational>>, LinalgError> {
    if !m.is_real() {
        return Err(LinalgError::NotReal);
    }
    Ok((0..m.rows()).map(|i| m.row(i).iter().map(|z| z.re.clone()).collect()).collect())
}

/// Find `x > 0` with `Mx = 0`, or a Stiemke certificate that none exists.
pub fn strictly_positive_nullvector(m: &RatMatrix) -> Result<PositiveNullOutcome, LinalgError> {
    let rows = real_rows(m)?;
    let n = m.cols();
    let ones = vec![Rational::one(); n];
    let rhs: Vec<Rational> = rows
        .iter()
        .map(|row| -row.iter().zip(&ones).map(|(a, b)| a * b).sum::<Rational>())
        .collect();

    let phase = PhaseOne::solve(&rows, &rhs);
    if phase.objective().is_zero() {
        let z = phase.primal(n);
        let x: Vec<Rational> = z.into_iter().map(|zj| zj + Rational::one()).collect();
        return Ok(PositiveNullOutcome::Positive(x));
    }
    // y = -S w, where S flips rows whose rhs was negative.
    let w = phase.duals();
    let y: Vec<Rational> = w
        .into_iter()
        .zip(&phase.signs)
        .map(|(wi, &flip)| if flip { wi } else { -wi })
        .collect();
    Ok(PositiveNullOutcome::Infeasible(StiemkeCertificate { y: primitive_integer(y) }))
}

/// Rescale by a positive rational to a coprime integer vector.
fn primitive_integer(v: Vec<Rational>) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = v.iter().map(|r| (r * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| BigRational::from_integer(x / &g)).collect()
}

/// Dense phase-one tableau over `[S·M | I]` with artificial columns kept to
/// the end so the final basis inverse can be read off them.
struct PhaseOne {
    tableau: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    n: usize,
    m: usize,
    /// `true` where the row was negated to make its rhs non-negative.
    signs: Vec<bool>,
}

impl PhaseOne {
    fn solve(rows: &[Vec<Rational>], b: &[Rational]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut tableau = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut signs = Vec::with_capacity(m);
        for (i, (row, bi)) in rows.iter().zip(b).enumerate() {
            let flip = bi.is_negative();
            let s = if flip { -Rational::one() } else { Rational::one() };
            let mut t: Vec<Rational> = row.iter().map(|a| a * &s).collect();
            t.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            tableau.push(t);
            rhs.push(bi * &s);
            signs.push(flip);
        }
        let mut p = PhaseOne { tableau, rhs, basis: (n..n + m).collect(), n, m, signs };
        p.run();
        p
    }

    fn cost(&self, j: usize) -> Rational {
        if j >= self.n {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    fn reduced_cost(&self, j: usize) -> Rational {
        let mut r = self.cost(j);
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv >= self.n && !self.tableau[i][j].is_zero() {
                r -= &self.tableau[i][j];
            }
        }
        r
    }

    fn run(&mut self) {
        loop {
            // Bland: lowest-index improving column.
            let Some(enter) = (0..self.n + self.m).find(|&j| self.reduced_cost(j).is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                let a = &self.tableau[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // Phase one is bounded below by zero, so a ratio row always exists.
            let (row, _) = leave.expect("phase-one objective is bounded");
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tableau[row][col].clone();
        for v in self.tableau[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let prow = self.tableau[row].clone();
        let prhs = self.rhs[row].clone();
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.tableau[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.tableau[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[row] = col;
    }

    fn objective(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&bv, _)| bv >= self.n)
            .map(|(_, r)| r.clone())
            .sum()
    }

    fn primal(&self, n: usize) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); n];
        for (&bv, r) in self.basis.iter().zip(&self.rhs) {
            if bv < n {
                z[bv] = r.clone();
            }
        }
        z
    }

    /// `w = c_Bᵀ B⁻¹`; `B⁻¹` sits in the artificial columns.
    fn duals(&self) -> Vec<Rational> {
        (0..self.m)
            .map(|k| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &bv)| bv >= self.n)
                    .map(|(i, _)| self.tableau[i][self.n + k].clone())
                    .sum()
            })
            .collect()
    }
}
