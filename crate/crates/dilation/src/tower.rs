//! Truncated interleaved dilation towers.
//!
//! Both sides are stored as lists of segments. A segment is one
//! representation `σ` of `Ã` (or `B̃`) on `input ⊕ out₁ ⊕ … ⊕ out_r`: layer 0
//! has the shared prefix (`H`, or `H ⊕ K_D`) as input, and every later
//! segment takes as input one cyclic piece of an out-block of the opposite
//! side, extended by [`Extender`]. The full spaces `H̃_A`, `H̃_B` are the
//! orthogonal sums of the segments of each side, and `U` identifies every
//! out-block piece with the input of the segment built on it.

use std::collections::BTreeMap;

use fdca::{validate_diagram, AmalgamSetup, CondExp, Element, Expectations, FdAlgebra, Inclusion};
use num_complex::Complex64;
use serde::Serialize;

use crate::gns::{assemble, module_tensor, Extender, ModuleTensor, STATE_EXTENSION};
use crate::rep::{complement, fro, hcat, isometry_defect, to_cmat, CMat, FloatMap, Representation};
use crate::DilationError;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    #[serde(rename = "equalD")]
    EqualD,
    #[serde(rename = "condexp")]
    CondExp,
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub side: Side,
    pub layer: usize,
    pub rep: Representation,
    pub input_dim: usize,
    pub out_blocks: Vec<usize>,
    /// `(segment, offset, len)` of the opposite-side block this input is
    /// identified with; `None` for the prefix.
    pub source: Option<(usize, usize, usize)>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SummandDim {
    pub name: String,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub mode: Mode,
    pub depth: usize,
    pub tolerance: f64,
    pub summand_dims: Vec<SummandDim>,
    pub total_dim: usize,
    pub segments: usize,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    pub verified_subspace: String,
    pub state_extension: String,
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub mode: Mode,
    pub depth: usize,
    pub h_dim: usize,
    pub prefix_dim: usize,
    pub segments: Vec<Segment>,
    glue_a: FloatMap,
    glue_b: FloatMap,
    lambda_a: FloatMap,
    lambda_b: FloatMap,
    pi_a: Representation,
    pi_b: Representation,
    /// Prefix representation of the gluing algebra and its own check.
    prefix_rep: Representation,
    layer0_residual: f64,
    at: FdAlgebra,
    bt: FdAlgebra,
}

/// The arrows of the construction for either mode.
struct Arrows {
    lambda_a: Inclusion,
    lambda_b: Inclusion,
    /// Gluing algebra `G` (`D`, or `D̃`) into `Ã`, `B̃`.
    glue_a: Inclusion,
    glue_b: Inclusion,
}

fn check_input(setup: &AmalgamSetup, pi_a: &Representation, pi_b: &Representation) -> Result<(), DilationError> {
    if pi_a.algebra() != setup.a() || pi_b.algebra() != setup.b() {
        return Err(DilationError::Shape("input representations are not of A and B".into()));
    }
    if pi_a.dim() != pi_b.dim() {
        return Err(DilationError::Shape(format!(
            "input representations on spaces of dimension {} and {}",
            pi_a.dim(),
            pi_b.dim()
        )));
    }
    let da = pi_a.pullback(&FloatMap::new(&setup.incl_a));
    let db = pi_b.pullback(&FloatMap::new(&setup.incl_b));
    let gap = da.images().iter().zip(db.images()).map(|(x, y)| fro(&(x - y))).fold(0.0, f64::max);
    if gap > DEFAULT_TOLERANCE.max(1e-12) {
        return Err(DilationError::DAgreementFailure(gap));
    }
    Ok(())
}

/// Equal-D tower: the gluing algebra is `D` itself, included in
/// `Ã` by `λ_A∘ι_A` and in `B̃` by `λ_B∘ι_B`. Without an upper row
/// `Ã = A`, `B̃ = B` and the tower collapses.
pub fn build_tower_equal_d(
    setup: &AmalgamSetup,
    pi_a: &Representation,
    pi_b: &Representation,
    depth: usize,
    tol: f64,
) -> Result<(Tower, TowerReport), DilationError> {
    check_input(setup, pi_a, pi_b)?;
    let (lambda_a, lambda_b) = match &setup.upper {
        Some(u) => (u.lambda_a.clone(), u.lambda_b.clone()),
        None => (Inclusion::identity(setup.a()), Inclusion::identity(setup.b())),
    };
    let arrows = Arrows {
        glue_a: setup.incl_a.then(&lambda_a)?,
        glue_b: setup.incl_b.then(&lambda_b)?,
        lambda_a,
        lambda_b,
    };
    let ext_a = assemble(pi_a.dim(), arrows.lambda_a.target(), &Extender::new(&arrows.lambda_a).pieces(pi_a)?)?;
    let ext_b = assemble(pi_b.dim(), arrows.lambda_b.target(), &Extender::new(&arrows.lambda_b).pieces(pi_b)?)?;
    let seg_a = Segment {
        side: Side::A,
        layer: 0,
        input_dim: pi_a.dim(),
        out_blocks: ext_a.pieces.iter().map(|p| p.k_dim()).filter(|&k| k > 0).collect(),
        rep: ext_a.rep,
        source: None,
    };
    let seg_b = Segment {
        side: Side::B,
        layer: 0,
        input_dim: pi_b.dim(),
        out_blocks: ext_b.pieces.iter().map(|p| p.k_dim()).filter(|&k| k > 0).collect(),
        rep: ext_b.rep,
        source: None,
    };
    let prefix_rep = pi_a.pullback(&FloatMap::new(&setup.incl_a));
    let tower = grow(Mode::EqualD, &arrows, pi_a, pi_b, prefix_rep, 0.0, seg_a, seg_b, depth)?;
    let report = tower.report(tol);
    Ok((tower, report))
}

/// Conditional-expectation tower over the full diagram with expectations. Layer 0
/// is `L²(Ã,E_A) ⊗_A H ⊇ L²(D̃,E_D) ⊗_D H = H ⊕ K_D`, and symmetrically for
/// `B̃`; the gluing algebra of later layers is `D̃`.
pub fn build_tower_condexp(
    setup: &AmalgamSetup,
    exps: &Expectations,
    pi_a: &Representation,
    pi_b: &Representation,
    depth: usize,
    tol: f64,
) -> Result<(Tower, TowerReport), DilationError> {
    let diag = validate_diagram(setup, Some(exps))?;
    if !diag.ok {
        return Err(DilationError::DiagramFailure(Box::new(diag)));
    }
    check_input(setup, pi_a, pi_b)?;
    let upper = setup.upper.as_ref().ok_or_else(|| DilationError::Shape("condexp mode needs the upper row".into()))?;
    let arrows = Arrows {
        lambda_a: upper.lambda_a.clone(),
        lambda_b: upper.lambda_b.clone(),
        glue_a: upper.phi_at.clone(),
        glue_b: upper.phi_bt.clone(),
    };
    let pi_d = pi_a.pullback(&FloatMap::new(&setup.incl_a));
    let md = module_tensor(&exps.e_d, &pi_d)?;
    let h = pi_a.dim();
    // σ_D restricted along λ_D, compressed to H, must be π_D
    let sd_on_d = md.rep.pullback(&FloatMap::new(&upper.lambda_d));
    let mut layer0 = sd_on_d.leakage(0, h);
    layer0 = layer0.max(max_diff(&sd_on_d.compress(0, h), &pi_d));
    let (seg_a, ra) = condexp_layer0(Side::A, &exps.e_a, &upper.phi_at, pi_a, &md)?;
    let (seg_b, rb) = condexp_layer0(Side::B, &exps.e_b, &upper.phi_bt, pi_b, &md)?;
    layer0 = layer0.max(ra).max(rb);
    let tower = grow(Mode::CondExp, &arrows, pi_a, pi_b, md.rep.clone(), layer0, seg_a, seg_b, depth)?;
    let report = tower.report(tol);
    Ok((tower, report))
}

fn condexp_layer0(
    side: Side,
    e: &CondExp,
    phi: &Inclusion,
    pi: &Representation,
    md: &ModuleTensor,
) -> Result<(Segment, f64), DilationError> {
    let m = module_tensor(e, pi)?;
    let h = pi.dim();
    let coef = to_cmat(&phi.linear_map()).kronecker(&CMat::identity(h, h));
    let psi = &m.coords * coef * &md.lift;
    let defect = isometry_defect(&psi);
    if defect > 1e-6 {
        return Err(DilationError::Numerical(format!(
            "L²(D̃) ⊗ H does not embed isometrically (defect {defect:e})"
        )));
    }
    let w = hcat(&psi, &complement(&psi));
    let rep = m.rep.conjugate(&w);
    let p = md.rep.dim();
    // the embedded prefix carries σ_D through φ
    let via_phi = rep.pullback(&FloatMap::new(phi));
    let res = via_phi.leakage(0, p).max(max_diff(&via_phi.compress(0, p), &md.rep));
    let k = rep.dim() - p;
    let seg = Segment {
        side,
        layer: 0,
        input_dim: p,
        out_blocks: if k > 0 { vec![k] } else { vec![] },
        rep,
        source: None,
    };
    Ok((seg, res))
}

fn max_diff(x: &Representation, y: &Representation) -> f64 {
    x.images().iter().zip(y.images()).map(|(a, b)| fro(&(a - b))).fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    mode: Mode,
    arrows: &Arrows,
    pi_a: &Representation,
    pi_b: &Representation,
    prefix_rep: Representation,
    layer0_residual: f64,
    seg_a: Segment,
    seg_b: Segment,
    depth: usize,
) -> Result<Tower, DilationError> {
    let ext_a = Extender::new(&arrows.glue_a);
    let ext_b = Extender::new(&arrows.glue_b);
    let glue_a = ext_a.map().clone();
    let glue_b = ext_b.map().clone();
    let prefix_dim = seg_a.input_dim;
    let mut segments = vec![seg_a, seg_b];
    let mut frontier = vec![0, 1];
    for layer in 1..=depth {
        let mut next = Vec::new();
        for s in frontier {
            let side = segments[s].side;
            let (own, ext) = match side {
                Side::A => (&glue_a, &ext_b),
                Side::B => (&glue_b, &ext_a),
            };
            let g_rep = segments[s].rep.pullback(own);
            let mut o = segments[s].input_dim;
            let blocks = segments[s].out_blocks.clone();
            let mut rot = CMat::identity(segments[s].rep.dim(), segments[s].rep.dim());
            let mut children = Vec::new();
            for m in blocks {
                let pieces = ext.pieces(&g_rep.compress(o, m))?;
                let mut off = 0;
                for p in pieces {
                    rot.view_mut((o, o + off), (m, p.input_dim())).copy_from(&p.basis);
                    let k = p.k_dim();
                    children.push(Segment {
                        side: side.other(),
                        layer,
                        input_dim: p.input_dim(),
                        out_blocks: if k > 0 { vec![k] } else { vec![] },
                        rep: p.rep,
                        source: Some((s, o + off, p.basis.ncols())),
                    });
                    off += children.last().expect("pushed").input_dim;
                }
                if off != m {
                    return Err(DilationError::Numerical(format!("cyclic pieces span {off} of {m} dimensions")));
                }
                o += m;
            }
            segments[s].rep = segments[s].rep.conjugate(&rot);
            for c in children {
                next.push(segments.len());
                segments.push(c);
            }
        }
        frontier = next;
    }
    Ok(Tower {
        mode,
        depth,
        h_dim: pi_a.dim(),
        prefix_dim,
        segments,
        glue_a,
        glue_b,
        lambda_a: FloatMap::new(&arrows.lambda_a),
        lambda_b: FloatMap::new(&arrows.lambda_b),
        pi_a: pi_a.clone(),
        pi_b: pi_b.clone(),
        prefix_rep,
        layer0_residual,
        at: arrows.lambda_a.target().clone(),
        bt: arrows.lambda_b.target().clone(),
    })
}

/// A block of one side that the other side either takes as a segment
/// input (paired) or never sees (final layer).
#[derive(Clone, Copy, Debug)]
struct Atom {
    owner: usize,
    offset: usize,
    len: usize,
    partner: Option<usize>,
}

impl Tower {
    fn atoms(&self) -> Vec<Atom> {
        let mut by_source: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, s) in self.segments.iter().enumerate() {
            if let Some((p, o, _)) = s.source {
                by_source.insert((p, o), i);
            }
        }
        let mut atoms = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            let mut o = s.input_dim;
            for &m in &s.out_blocks {
                let end = o + m;
                let mut cur = o;
                while cur < end {
                    match by_source.get(&(i, cur)) {
                        Some(&c) => {
                            let len = self.segments[c].input_dim;
                            atoms.push(Atom { owner: i, offset: cur, len, partner: Some(c) });
                            cur += len;
                        }
                        None => {
                            atoms.push(Atom { owner: i, offset: cur, len: end - cur, partner: None });
                            cur = end;
                        }
                    }
                }
                o = end;
            }
        }
        atoms
    }

    pub fn side_segments(&self, side: Side) -> impl Iterator<Item = (usize, &Segment)> {
        self.segments.iter().enumerate().filter(move |(_, s)| s.side == side)
    }

    pub fn total_dim(&self) -> usize {
        self.prefix_dim + self.segments.iter().map(|s| s.out_blocks.iter().sum::<usize>()).sum::<usize>()
    }

    /// Offsets of each segment in its side's space, followed by the offsets
    /// of the unpaired opposite-side atoms (which that side does not act
    /// on).
    fn layout(&self, side: Side, atoms: &[Atom]) -> (Vec<Option<usize>>, BTreeMap<usize, usize>) {
        let mut seg_off = vec![None; self.segments.len()];
        let mut pos = 0;
        for (i, s) in self.side_segments(side) {
            seg_off[i] = Some(pos);
            pos += s.rep.dim();
        }
        let mut loose = BTreeMap::new();
        for (a, at) in atoms.iter().enumerate() {
            if at.partner.is_none() && self.segments[at.owner].side != side {
                loose.insert(a, pos);
                pos += at.len;
            }
        }
        (seg_off, loose)
    }

    /// `U` as a map of coordinates of `H̃_A` to coordinates of `H̃_B`.
    pub fn unitary_permutation(&self) -> Vec<usize> {
        let atoms = self.atoms();
        let (off_a, loose_a) = self.layout(Side::A, &atoms);
        let (off_b, loose_b) = self.layout(Side::B, &atoms);
        let n = self.total_dim();
        let mut perm = vec![usize::MAX; n];
        // prefix
        let (a0, b0) = (off_a[0].expect("A0"), off_b[1].expect("B0"));
        for i in 0..self.prefix_dim {
            perm[a0 + i] = b0 + i;
        }
        for (idx, at) in atoms.iter().enumerate() {
            let owner_side = self.segments[at.owner].side;
            let owner_pos = |offs: &Vec<Option<usize>>| offs[at.owner].expect("own side") + at.offset;
            let other_pos = |offs: &Vec<Option<usize>>, loose: &BTreeMap<usize, usize>| match at.partner {
                Some(c) => offs[c].expect("other side"),
                None => loose[&idx],
            };
            let (pa, pb) = match owner_side {
                Side::A => (owner_pos(&off_a), other_pos(&off_b, &loose_b)),
                Side::B => (other_pos(&off_a, &loose_a), owner_pos(&off_b)),
            };
            for i in 0..at.len {
                perm[pa + i] = pb + i;
            }
        }
        perm
    }

    /// Summand dimensions in tower order: `H`, `K_D`, then `K_{A,n}`,
    /// `K_{B,n}` for each layer.
    pub fn summand_dims(&self) -> Vec<SummandDim> {
        let mut out = vec![SummandDim { name: "H".into(), dim: self.h_dim }];
        if self.mode == Mode::CondExp {
            out.push(SummandDim { name: "K_D".into(), dim: self.prefix_dim - self.h_dim });
        }
        for n in 0..=self.depth {
            for side in [Side::A, Side::B] {
                let dim = self
                    .segments
                    .iter()
                    .filter(|s| s.side == side && s.layer == n)
                    .map(|s| s.out_blocks.iter().sum::<usize>())
                    .sum();
                out.push(SummandDim { name: format!("K_{side:?}{n}"), dim });
            }
        }
        out
    }

    pub fn residuals(&self) -> BTreeMap<String, f64> {
        let mut r = BTreeMap::new();
        let star = self.segments.iter().map(|s| s.rep.star_hom_residual()).fold(0.0, f64::max);
        r.insert("star_hom".to_string(), star);

        // H invariant under λ(A), compressed action equal to π
        for (name, seg, lam, pi) in
            [("h_invariance_a", 0, &self.lambda_a, &self.pi_a), ("h_invariance_b", 1, &self.lambda_b, &self.pi_b)]
        {
            let rep = self.segments[seg].rep.pullback(lam);
            let v = rep.leakage(0, self.h_dim).max(max_diff(&rep.compress(0, self.h_dim), pi));
            r.insert(name.to_string(), v);
        }

        let glued: Vec<Representation> = self
            .segments
            .iter()
            .map(|s| match s.side {
                Side::A => s.rep.pullback(&self.glue_a),
                Side::B => s.rep.pullback(&self.glue_b),
            })
            .collect();

        // each segment on its input: the prefix action at layer 0, the
        // owner's compressed action later
        let mut repextend = self.layer0_residual;
        let mut agreement: f64 = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            let g = &glued[i];
            let inp = g.compress(0, s.input_dim);
            let want = match s.source {
                None => self.prefix_rep.clone(),
                Some((p, o, len)) => glued[p].compress(o, len),
            };
            let v = g.leakage(0, s.input_dim).max(max_diff(&inp, &want));
            if s.source.is_some() {
                repextend = repextend.max(v);
            }
            agreement = agreement.max(v);
        }
        // paired atoms are reducing for the owner's gluing action
        for at in self.atoms().iter().filter(|a| a.partner.is_some()) {
            agreement = agreement.max(glued[at.owner].leakage(at.offset, at.len));
        }
        r.insert("repextend".to_string(), repextend);
        r.insert("d_agreement".to_string(), agreement);

        let perm = self.unitary_permutation();
        let mut seen = vec![false; perm.len()];
        let bijective = perm.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true));
        r.insert("unitary_u".to_string(), if bijective { 0.0 } else { 1.0 });
        r
    }

    pub fn report(&self, tol: f64) -> TowerReport {
        let residuals = self.residuals();
        let pass = residuals.values().all(|&v| v.is_finite() && v <= tol);
        let interior = match self.mode {
            Mode::EqualD => "H",
            Mode::CondExp => "H ⊕ K_D",
        };
        TowerReport {
            mode: self.mode,
            depth: self.depth,
            tolerance: tol,
            summand_dims: self.summand_dims(),
            total_dim: self.total_dim(),
            segments: self.segments.len(),
            residuals,
            pass,
            verified_subspace: format!(
                "agreement of the gluing algebra is checked on {interior} and on K_(A,n), K_(B,n) for n < {}; \
                 the final blocks K_(A,{}), K_(B,{}) carry no representation of the opposite side",
                self.depth, self.depth, self.depth
            ),
            state_extension: STATE_EXTENSION.to_string(),
        }
    }

    /// Dense `π̃_Ã` and `U*π̃_B̃U` on `H̃_A`, both zero on the unpaired final
    /// blocks of the opposite side. Only sensible at small depth.
    pub fn materialize(&self) -> Materialized {
        let atoms = self.atoms();
        let n = self.total_dim();
        let dense = |side: Side, alg: &FdAlgebra| -> Vec<CMat> {
            let (offs, _) = self.layout(side, &atoms);
            (0..alg.dim())
                .map(|u| {
                    let mut m = CMat::zeros(n, n);
                    for (i, s) in self.side_segments(side) {
                        let o = offs[i].expect("own side");
                        m.view_mut((o, o), (s.rep.dim(), s.rep.dim())).copy_from(&s.rep.images()[u]);
                    }
                    m
                })
                .collect()
        };
        let perm = self.unitary_permutation();
        let mut u = CMat::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            u[(p, i)] = Complex64::new(1.0, 0.0);
        }
        let pi_b = dense(Side::B, &self.bt).into_iter().map(|m| u.adjoint() * m * &u).collect();
        Materialized { pi_a: dense(Side::A, &self.at), pi_b, u }
    }

    pub fn glue_maps(&self) -> (&FloatMap, &FloatMap) {
        (&self.glue_a, &self.glue_b)
    }

    pub fn lambda_maps(&self) -> (&FloatMap, &FloatMap) {
        (&self.lambda_a, &self.lambda_b)
    }
}

/// Dense operators on `H̃_A`; `pi_b` is already conjugated by `u`.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub pi_a: Vec<CMat>,
    pub pi_b: Vec<CMat>,
    pub u: CMat,
}

impl Materialized {
    pub fn apply(images: &[CMat], map: &FloatMap) -> Vec<CMat> {
        map.terms
            .iter()
            .map(|ts| {
                let mut m = CMat::zeros(images[0].nrows(), images[0].ncols());
                for &(i, c) in ts {
                    m += &images[i] * c;
                }
                m
            })
            .collect()
    }
}

/// Element-level convenience for tests: `π(x)` for an exact element.
pub fn dense_apply(images: &[CMat], x: &Element) -> CMat {
    let mut m = CMat::zeros(images[0].nrows(), images[0].ncols());
    for (c, im) in x.coords().iter().zip(images) {
        m += im * crate::rep::to_c64(c);
    }
    m
}
