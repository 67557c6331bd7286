//! GNS representations, extension of representations along inclusions,
//! and interior tensor products with `L²(Ã, E)`.

use fdca::{CondExp, Element, FdAlgebra, Inclusion, MatrixUnit};
use num_complex::Complex64;

use crate::rep::{
    columns_to_mat, complement, extend_orthonormal, fro, hcat, isometry_defect, left_mult, to_cmat,
    unit_coords, FloatMap, CMat, CVec, Quotient, Representation,
};
use crate::DilationError;

/// Relative threshold below which Gram eigenvalues are quotiented.
pub const KERNEL_THRESHOLD: f64 = 1e-10;
/// Tolerance on negative Gram eigenvalues and on `φ(1) = 1`.
pub const STATE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Gns {
    pub rep: Representation,
    pub omega: CVec,
}

/// GNS representation of the state with values `phi[u] = φ(eᵤ)` on the
/// matrix units of `a`.
pub fn gns(a: &FdAlgebra, phi: &[Complex64]) -> Result<Gns, DilationError> {
    if phi.len() != a.dim() {
        return Err(DilationError::Shape(format!("{} state values for dimension {}", phi.len(), a.dim())));
    }
    let one: Complex64 = (0..a.num_blocks())
        .flat_map(|k| (0..a.block_sizes()[k]).map(move |i| MatrixUnit::new(k, i, i)))
        .map(|u| phi[a.unit_index(u)])
        .sum();
    if (one - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
        return Err(DilationError::NotAState(format!("value on the unit is {one}")));
    }
    let units: Vec<MatrixUnit> = a.units().collect();
    let n = units.len();
    // eᵤ* e_v = e_{u.col, v.col} when u.row = v.row in the same block
    let g = CMat::from_fn(n, n, |i, j| {
        let (u, v) = (units[i], units[j]);
        if u.block == v.block && u.row == v.row {
            phi[a.unit_index(MatrixUnit::new(u.block, u.col, v.col))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let q = Quotient::of_gram(&g, KERNEL_THRESHOLD, STATE_TOLERANCE)
        .map_err(|min| DilationError::NotAState(format!("Gram matrix has eigenvalue {min:e}")))?;
    let images = units.iter().map(|&w| q.induced(&left_mult(a, w))).collect();
    let rep = Representation::new(a, q.dim(), images)?;
    let omega = &q.coords * unit_coords(a);
    Ok(Gns { rep, omega })
}

/// `φ(x) = ⟨ξ, π(x)ξ⟩` on the matrix units.
pub fn vector_state(pi: &Representation, xi: &CVec) -> Vec<Complex64> {
    pi.images().iter().map(|m| xi.dotc(&(m * xi))).collect()
}

/// One cyclic piece of an extension: `Z ⊆ H` with orthonormal basis
/// `basis`, and a representation of `C̃` on `Z ⊕ Kᵢ` whose first
/// `basis.ncols()` coordinates are `Z` in that basis.
#[derive(Clone, Debug)]
pub struct Piece {
    pub basis: CMat,
    pub rep: Representation,
}

impl Piece {
    pub fn input_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn k_dim(&self) -> usize {
        self.rep.dim() - self.input_dim()
    }
}

/// Greedy cyclic decomposition over the standard basis: returns
/// orthonormal bases of mutually orthogonal cyclic subspaces together with
/// their cyclic unit vectors.
pub fn cyclic_decomposition(pi: &Representation) -> Vec<(CMat, CVec)> {
    let h = pi.dim();
    let mut used: Vec<CVec> = Vec::new();
    let mut out = Vec::new();
    for i in 0..h {
        if used.len() == h {
            break;
        }
        let mut e = CVec::zeros(h);
        e[i] = Complex64::new(1.0, 0.0);
        let mut tmp = used.clone();
        extend_orthonormal(&mut tmp, std::iter::once(e), 1e-8);
        if tmp.len() == used.len() {
            continue;
        }
        let xi = tmp.pop().expect("just pushed");
        let mut z: Vec<CVec> = Vec::new();
        extend_orthonormal(&mut z, pi.images().iter().map(|m| m * &xi), 1e-9);
        // reorthogonalize against earlier pieces
        let mut all = used.clone();
        let before = all.len();
        extend_orthonormal(&mut all, z, 1e-9);
        let z: Vec<CVec> = all.split_off(before);
        if z.is_empty() {
            continue;
        }
        used.extend(z.iter().cloned());
        out.push((columns_to_mat(h, &z), xi));
    }
    out
}

/// Extension of `π` (a unital representation of `C`) along `incl: C → C̃`.
#[derive(Clone, Debug)]
pub struct Extension {
    /// Representation of `C̃` on `H ⊕ K`, `H` first in its original basis.
    pub rep: Representation,
    pub h_dim: usize,
    pub pieces: Vec<Piece>,
    /// Offsets of the pieces' `Kᵢ` blocks inside `K`.
    pub k_offsets: Vec<usize>,
}

impl Extension {
    pub fn k_dim(&self) -> usize {
        self.rep.dim() - self.h_dim
    }

    /// `‖P_H π̃(ι(eᵤ)) P_H − π(eᵤ)‖` and the leakage out of `H`, maximized.
    pub fn repextend_residual(&self, pi: &Representation, incl: &Inclusion) -> Result<f64, DilationError> {
        let r = self.rep.restrict(incl)?;
        let c = r.compress(0, self.h_dim);
        let diff = c.images().iter().zip(pi.images()).map(|(x, y)| fro(&(x - y))).fold(0.0, f64::max);
        Ok(diff.max(r.leakage(0, self.h_dim)))
    }
}

/// Extends representations of `C` along a fixed `ι: C → C̃`.
///
/// Each cyclic piece `Z` with cyclic vector `ξ` gets the GNS representation
/// of `φ∘E` (`φ = ⟨ξ, π(·)ξ⟩`), into which `Z` embeds by
/// `π(c)ξ ↦ ρ(ι(c))Ω`.
#[derive(Clone, Debug)]
pub struct Extender {
    incl: Inclusion,
    map: FloatMap,
    expectation: CMat,
}

impl Extender {
    pub fn new(incl: &Inclusion) -> Self {
        let e = CondExp::canonical(incl);
        Extender { incl: incl.clone(), map: FloatMap::new(incl), expectation: to_cmat(e.matrix()) }
    }

    pub fn inclusion(&self) -> &Inclusion {
        &self.incl
    }

    pub fn map(&self) -> &FloatMap {
        &self.map
    }

    /// `φ∘E` on the matrix units of `C̃`.
    pub fn extend_state(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let m = &self.expectation;
        (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| m[(i, j)] * phi[i]).sum()).collect()
    }

    pub fn pieces(&self, pi: &Representation) -> Result<Vec<Piece>, DilationError> {
        if self.incl.source() != pi.algebra() {
            return Err(DilationError::Shape("representation and inclusion disagree on the algebra".into()));
        }
        if pi.dim() > 0 && pi.unit_residual() > STATE_TOLERANCE.sqrt() {
            return Err(DilationError::NotUnitalRep(pi.unit_residual()));
        }
        let target = self.incl.target();
        let mut pieces = Vec::new();
        for (basis, xi) in cyclic_decomposition(pi) {
            let g = gns(target, &self.extend_state(&vector_state(pi, &xi)))?;
            let ba = basis.adjoint();
            let x = columns_to_mat(basis.ncols(), &pi.images().iter().map(|m| &ba * (m * &xi)).collect::<Vec<_>>());
            let y = columns_to_mat(
                g.rep.dim(),
                &g.rep.pullback(&self.map).images().iter().map(|m| m * &g.omega).collect::<Vec<_>>(),
            );
            let xp = x
                .pseudo_inverse(1e-10)
                .map_err(|m| DilationError::Numerical(format!("pseudo-inverse failed: {m}")))?;
            let v = y * xp;
            let defect = isometry_defect(&v);
            if defect > 1e-6 {
                return Err(DilationError::Numerical(format!(
                    "cyclic piece embeds with isometry defect {defect:e}"
                )));
            }
            let w = hcat(&v, &complement(&v));
            pieces.push(Piece { basis, rep: g.rep.conjugate(&w) });
        }
        Ok(pieces)
    }
}

/// Assembles the pieces into one representation on `H ⊕ (⊕ Kᵢ)`.
pub fn assemble(h_dim: usize, algebra: &FdAlgebra, pieces: &[Piece]) -> Result<Extension, DilationError> {
    let k_dim: usize = pieces.iter().map(Piece::k_dim).sum();
    let dim = h_dim + k_dim;
    // rotation taking piece coordinates of H back to the original basis
    let mut rot = CMat::identity(dim, dim);
    let mut zoff = 0;
    let mut idx: Vec<Vec<usize>> = Vec::new();
    let mut k_offsets = Vec::new();
    let mut koff = 0;
    for p in pieces {
        rot.view_mut((0, zoff), (h_dim, p.input_dim())).copy_from(&p.basis);
        let mut ix: Vec<usize> = (zoff..zoff + p.input_dim()).collect();
        ix.extend(h_dim + koff..h_dim + koff + p.k_dim());
        idx.push(ix);
        k_offsets.push(koff);
        zoff += p.input_dim();
        koff += p.k_dim();
    }
    if zoff != h_dim {
        return Err(DilationError::Numerical(format!("cyclic pieces span {zoff} of {h_dim} dimensions")));
    }
    let images = (0..algebra.dim())
        .map(|u| {
            let mut m = CMat::zeros(dim, dim);
            for (p, ix) in pieces.iter().zip(&idx) {
                let pm = &p.rep.images()[u];
                for (a, &i) in ix.iter().enumerate() {
                    for (b, &j) in ix.iter().enumerate() {
                        m[(i, j)] = pm[(a, b)];
                    }
                }
            }
            &rot * m * rot.adjoint()
        })
        .collect();
    Ok(Extension { rep: Representation::new(algebra, dim, images)?, h_dim, pieces: pieces.to_vec(), k_offsets })
}

/// Extension of `π` along `incl: C ⊆ C̃` to `H ⊕ K` with `H` embedded as
/// the first coordinates.
pub fn extend_representation(pi: &Representation, incl: &Inclusion) -> Result<Extension, DilationError> {
    let pieces = Extender::new(incl).pieces(pi)?;
    assemble(pi.dim(), incl.target(), &pieces)
}

/// `L²(Ã, E) ⊗_A H` for `E: Ã → A` and a unital representation `π` of `A`
/// on `H`, in an orthonormal frame whose first `h_dim` vectors are
/// `1 ⊗ H`.
#[derive(Clone, Debug)]
pub struct ModuleTensor {
    pub rep: Representation,
    pub h_dim: usize,
    /// Coefficients over `(eᵤ, fᵢ)`, index `u·h + i`, to frame coordinates.
    pub coords: CMat,
    pub lift: CMat,
}

impl ModuleTensor {
    pub fn k_dim(&self) -> usize {
        self.rep.dim() - self.h_dim
    }
}

pub fn module_tensor(e: &CondExp, pi: &Representation) -> Result<ModuleTensor, DilationError> {
    let sub = e.inclusion().source();
    let amb = e.inclusion().target();
    if pi.algebra() != sub {
        return Err(DilationError::Shape("representation is not of the expectation's range".into()));
    }
    let res = pi.unit_residual();
    if res > STATE_TOLERANCE.sqrt() {
        return Err(DilationError::NotUnitalRep(res));
    }
    let h = pi.dim();
    let units: Vec<MatrixUnit> = amb.units().collect();
    let n = units.len() * h;
    let mut g = CMat::zeros(n, n);
    for (a, &u) in units.iter().enumerate() {
        let ua = Element::matrix_unit(amb, u).adjoint();
        for (b, &v) in units.iter().enumerate() {
            let p = e.project(&(&ua * &Element::matrix_unit(amb, v)));
            if p.is_zero() {
                continue;
            }
            let m = pi.apply(&p);
            g.view_mut((a * h, b * h), (h, h)).copy_from(&m);
        }
    }
    let q = Quotient::of_gram(&g, KERNEL_THRESHOLD, STATE_TOLERANCE)
        .map_err(|min| DilationError::Numerical(format!("module Gram matrix has eigenvalue {min:e}")))?;
    let ones = unit_coords(amb);
    let emb = CMat::from_fn(n, h, |r, c| if r % h == c { ones[r / h] } else { Complex64::new(0.0, 0.0) });
    let j = &q.coords * emb;
    let defect = isometry_defect(&j);
    if defect > 1e-6 {
        return Err(DilationError::Numerical(format!("H embeds with isometry defect {defect:e}")));
    }
    let w = hcat(&j, &complement(&j));
    let coords = w.adjoint() * &q.coords;
    let lift = &q.lift * &w;
    let id = CMat::identity(h, h);
    let images = units
        .iter()
        .map(|&x| &coords * left_mult(amb, x).kronecker(&id) * &lift)
        .collect();
    Ok(ModuleTensor { rep: Representation::new(amb, w.ncols(), images)?, h_dim: h, coords, lift })
}

/// Recorded in reports: which state extension the towers use.
pub const STATE_EXTENSION: &str =
    "vector states of cyclic pieces composed with the trace-preserving expectation for the default trace";
