//! Random small inputs for property tests and the acceptance suite.
//!
//! All generators take the RNG by reference, so a seeded RNG gives a
//! reproducible stream.

use fdca_exact::{rat, GaussRational, RatMatrix, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Element, FdAlgebra};
use crate::cert::CertInput;
use crate::condexp::CondExp;
use crate::diagram::{AmalgamSetup, UpperRow};
use crate::inclusion::Inclusion;
use crate::trace::Trace;

pub fn algebra<R: Rng>(rng: &mut R, max_blocks: usize, max_size: usize) -> FdAlgebra {
    let m = rng.gen_range(1..=max_blocks);
    FdAlgebra::new((0..m).map(|_| rng.gen_range(1..=max_size)).collect()).expect("positive sizes")
}

/// A random target algebra with a unital inclusion of `d`, conjugated by a
/// random block permutation so the layout is not the canonical one.
pub fn unital_extension<R: Rng>(rng: &mut R, d: &FdAlgebra, max_blocks: usize, max_size: usize) -> Inclusion {
    let n = d.block_sizes();
    assert!(n.iter().all(|&s| s <= max_size), "source block larger than max_size");
    loop {
        let m = rng.gen_range(1..=max_blocks);
        let mult: Vec<Vec<usize>> = (0..m)
            .map(|_| loop {
                let row: Vec<usize> = n.iter().map(|&s| rng.gen_range(0..=max_size / s)).collect();
                let size: usize = row.iter().zip(n).map(|(c, s)| c * s).sum();
                if (1..=max_size).contains(&size) {
                    break row;
                }
            })
            .collect();
        if (0..n.len()).any(|j| mult.iter().all(|r| r[j] == 0)) {
            continue;
        }
        let sizes = mult.iter().map(|r| r.iter().zip(n).map(|(c, s)| c * s).sum()).collect();
        let target = FdAlgebra::new(sizes).expect("positive sizes");
        let canon = Inclusion::canonical(&mult, d, &target).expect("bookkeeping holds by construction");
        return permute(rng, &canon);
    }
}

fn permute<R: Rng>(rng: &mut R, incl: &Inclusion) -> Inclusion {
    let perms: Vec<Vec<usize>> = incl
        .target()
        .block_sizes()
        .iter()
        .map(|&s| {
            let mut p: Vec<usize> = (0..s).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let images = incl
        .images()
        .map(|(_, e)| {
            let blocks = e
                .blocks()
                .iter()
                .zip(&perms)
                .map(|(b, p)| {
                    let mut out = RatMatrix::zeros(b.rows(), b.cols());
                    for r in 0..b.rows() {
                        for c in 0..b.cols() {
                            out[(p[r], p[c])] = b[(r, c)].clone();
                        }
                    }
                    out
                })
                .collect();
            Element::from_blocks(incl.target(), blocks).expect("same shape")
        })
        .collect();
    Inclusion::new(incl.source().clone(), incl.target().clone(), images).expect("same shape")
}

/// A random lower row `A ⊇ D ⊆ B` (at most `max_blocks` blocks of size at
/// most `max_size` everywhere).
pub fn lower_row<R: Rng>(rng: &mut R, max_blocks: usize, max_size: usize) -> AmalgamSetup {
    let d = algebra(rng, max_blocks, max_size.min(2));
    let ia = unital_extension(rng, &d, max_blocks, max_size);
    let ib = unital_extension(rng, &d, max_blocks, max_size);
    AmalgamSetup::new(ia, ib).expect("common source")
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-3..=3), *[1, 1, 2, 3].choose(rng).expect("nonempty"))
}

pub fn scalar<R: Rng>(rng: &mut R) -> GaussRational {
    if rng.gen_bool(0.5) {
        GaussRational::from_real(small_rational(rng))
    } else {
        GaussRational::new(small_rational(rng), small_rational(rng))
    }
}

pub fn element<R: Rng>(rng: &mut R, a: &FdAlgebra) -> Element {
    let coords: Vec<GaussRational> = (0..a.dim()).map(|_| scalar(rng)).collect();
    Element::from_coords(a, &coords)
}

/// Faithful trace with random positive weights, not normalized.
pub fn faithful_trace<R: Rng>(rng: &mut R, a: &FdAlgebra) -> Trace {
    Trace::new(a, (0..a.num_blocks()).map(|_| rat(rng.gen_range(1..=5), rng.gen_range(1..=4))).collect())
        .expect("one weight per block")
}

/// A certificate input over a commuting diagram with `Ã = A`, `B̃ = B`:
/// `D ⊆ D̃` random, `D̃ ⊆ A` and `D̃ ⊆ B` random, `ι_A = φ_Ã∘λ_D`.
///
/// With `dt_in_d`, `d̃` is drawn from `λ_D(D)`.
pub fn cert_input<R: Rng>(rng: &mut R, dt_in_d: bool) -> CertInput {
    let d = algebra(rng, 2, 2);
    let lambda_d = unital_extension(rng, &d, 2, 3);
    let dt = lambda_d.target().clone();
    let phi_at = unital_extension(rng, &dt, 2, 4);
    let phi_bt = unital_extension(rng, &dt, 2, 4);
    let ia = lambda_d.then(&phi_at).expect("composable");
    let ib = lambda_d.then(&phi_bt).expect("composable");
    let a = phi_at.target().clone();
    let b = phi_bt.target().clone();
    let setup = AmalgamSetup::new(ia.clone(), ib.clone())
        .expect("common source")
        .with_upper(UpperRow {
            lambda_a: Inclusion::identity(&a),
            lambda_b: Inclusion::identity(&b),
            lambda_d: lambda_d.clone(),
            phi_at,
            phi_bt,
        })
        .expect("arrows line up");
    let e_a = CondExp::trace_preserving(&ia, &faithful_trace(rng, &a)).expect("faithful");
    let e_b = CondExp::trace_preserving(&ib, &faithful_trace(rng, &b)).expect("faithful");
    let dt_el = if dt_in_d { lambda_d.apply(&element(rng, &d)) } else { element(rng, &dt) };
    let x = element(rng, &a);
    let y = element(rng, &b);
    CertInput::new(setup, e_a, e_b, x, y, dt_el).expect("shapes agree")
}
