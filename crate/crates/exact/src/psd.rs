//! Exact positive-semidefiniteness via pivoted LDL* elimination.

use num_traits::{Signed, Zero};

use crate::matrix::RatMatrix;
use crate::scalar::GaussRational;
use crate::LinalgError;

/// Decide whether a self-adjoint matrix is positive semidefinite, exactly.
///
/// Each step either rejects (negative diagonal, or zero diagonal with a
/// nonzero row), drops a zero row/column, or eliminates a positive pivot and
/// recurses on the Schur complement.
pub fn is_psd(h: &RatMatrix) -> Result<bool, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    if !h.is_self_adjoint() {
        return Err(LinalgError::NotSelfAdjoint);
    }
    let mut m: Vec<Vec<GaussRational>> = h.to_rows();
    loop {
        let n = m.len();
        if n == 0 {
            return Ok(true);
        }
        if m.iter().enumerate().any(|(i, row)| row[i].re.is_negative()) {
            return Ok(false);
        }
        let mut keep = Vec::with_capacity(n);
        for (i, row) in m.iter().enumerate() {
            if row[i].is_zero() {
                if row.iter().any(|x| !x.is_zero()) {
                    return Ok(false);
                }
            } else {
                keep.push(i);
            }
        }
        if keep.is_empty() {
            return Ok(true);
        }
        let k = keep[0];
        let pivot = m[k][k].clone();
        let rest: Vec<usize> = keep[1..].to_vec();
        // Schur complement: m[i][j] - m[i][k] m[k][j] / pivot
        let next: Vec<Vec<GaussRational>> = rest
            .iter()
            .map(|&i| {
                rest.iter()
                    .map(|&j| {
                        let corr = &(&m[i][k] * &m[k][j]) / &pivot;
                        &m[i][j] - &corr
                    })
                    .collect()
            })
            .collect();
        m = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(is_psd(&RatMatrix::identity(3)).unwrap());
        assert!(!is_psd(&RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).unwrap());
        assert!(is_psd(&RatMatrix::zeros(2, 2)).unwrap());
        assert!(is_psd(&RatMatrix::zeros(0, 0)).unwrap());
    }

    #[test]
    fn boundary_cases() {
        // rank-one PSD [[1,1],[1,1]]
        assert!(is_psd(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap());
        // zero diagonal with nonzero off-diagonal
        assert!(!is_psd(&RatMatrix::from_i64(&[&[0, 1], &[1, 1]])).unwrap());
        assert!(!is_psd(&RatMatrix::from_i64(&[&[-1]])).unwrap());
        // complex Hermitian [[1, i], [-i, 1]] is PSD and singular
        let i = GaussRational::i();
        let h = RatMatrix::from_rows(vec![
            vec![GaussRational::from_int(1), i.clone()],
            vec![-&i, GaussRational::from_int(1)],
        ])
        .unwrap();
        assert!(is_psd(&h).unwrap());
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(
            is_psd(&RatMatrix::from_i64(&[&[1, 2], &[0, 1]])),
            Err(LinalgError::NotSelfAdjoint)
        ));
        assert!(matches!(
            is_psd(&RatMatrix::zeros(1, 2)),
            Err(LinalgError::NotSquare { .. })
        ));
    }
}
