//! Turning a residual finite dimensionality witness into representations of
//! `A` and `B` on one space that agree on `D`.

use fdca::{AmalgamSetup, FdAlgebra, Inclusion, MatrixUnit};
use fdca::rfd::RfdWitness;
use num_integer::Integer;

use crate::rep::{columns_to_mat, extend_orthonormal, CVec, FloatMap, Representation};
use crate::DilationError;

#[derive(Clone, Debug)]
pub struct CommonRepresentation {
    pub dim: usize,
    pub pi_a: Representation,
    pub pi_b: Representation,
}

/// Amplifies both witness embeddings to `M_L`, `L = lcm(k, ℓ)`, and
/// rewrites each in a basis adapted to `D`: block `j`, copy `c`, row `a`
/// is the vector `ρ(e^j_{a0}) v_c` for an orthonormal basis `v_c` of the
/// range of `ρ(e^j_{00})`. Equal `D`-traces force equal multiplicities, so
/// both restrictions to `D` become the same matrices.
pub fn common_representation(setup: &AmalgamSetup, w: &RfdWitness) -> Result<CommonRepresentation, DilationError> {
    let l = w.k.lcm(&w.l);
    let ml = FdAlgebra::full(l);
    let amp = |k: usize| Inclusion::canonical(&[vec![l / k]], &FdAlgebra::full(k), &ml);
    let ea = w.embedding_a().then(&amp(w.k)?)?;
    let eb = w.embedding_b().then(&amp(w.l)?)?;
    let ra = Representation::from_inclusion(&ea)?;
    let rb = Representation::from_inclusion(&eb)?;
    let wa = path_basis(&ra.pullback(&FloatMap::new(&setup.incl_a)))?;
    let wb = path_basis(&rb.pullback(&FloatMap::new(&setup.incl_b)))?;
    if wa.1 != wb.1 {
        return Err(DilationError::DAgreementFailure(f64::NAN));
    }
    Ok(CommonRepresentation { dim: l, pi_a: ra.conjugate(&wa.0), pi_b: rb.conjugate(&wb.0) })
}

/// Unitary adapted to the representation `rho` of `D`, with the
/// multiplicity of every block.
fn path_basis(rho: &Representation) -> Result<(crate::rep::CMat, Vec<usize>), DilationError> {
    let d = rho.algebra().clone();
    let n = rho.dim();
    let mut cols: Vec<CVec> = Vec::new();
    let mut mult = Vec::new();
    for (j, &size) in d.block_sizes().iter().enumerate() {
        let p = rho.image(MatrixUnit::new(j, 0, 0));
        let mut range = Vec::new();
        extend_orthonormal(&mut range, p.column_iter().map(|c| c.into_owned()), 1e-9);
        mult.push(range.len());
        for v in &range {
            for a in 0..size {
                cols.push(rho.image(MatrixUnit::new(j, a, 0)) * v);
            }
        }
    }
    if cols.len() != n {
        return Err(DilationError::NotUnitalRep(rho.unit_residual()));
    }
    Ok((columns_to_mat(n, &cols), mult))
}
