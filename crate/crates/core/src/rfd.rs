//! Residual finite dimensionality of `A *_D B` for finite-dimensional `A`, `B`:
//! it holds iff faithful tracial states on `A` and `B` agree on `D`, i.e. iff
//! `[Λ_Aᵀ, −Λ_Bᵀ]·[s_A; s_B] = 0` has a strictly positive solution.
//!
//! A negative verdict carries a Stiemke vector for that system. That the
//! system's infeasibility rules out residual finite dimensionality is the
//! theorem's necessity direction; it is not witnessed by a construction.

use fdca_exact::scalar::rational_vec;
use fdca_exact::{strictly_positive_nullvector, GaussRational, PositiveNullOutcome, RatMatrix, Rational, StiemkeCertificate};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{Element, FdAlgebra, MatrixUnit};
use crate::diagram::AmalgamSetup;
use crate::error::AlgebraError;
use crate::inclusion::{Inclusion, StarHomReport};
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RfdError {
    #[error("inclusion is not a unital injective *-homomorphism: {0:?}")]
    InvalidInclusion(StarHomReport),
    #[error("block {block} of the source does not divide evenly into target block {target_block}")]
    Fractional { block: usize, target_block: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("trace is not normalized (τ(1) = {0})")]
    NotNormalized(String),
    #[error("trace is not faithful")]
    NotFaithful,
    #[error("the zero algebra has no unital inclusions; unitize first")]
    ZeroAmalgam,
    #[error("matrix size {0} does not fit in memory")]
    TooLarge(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `Λ[i][j]`: multiplicity of source block `j` in target block `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionMatrix {
    pub source_sizes: Vec<usize>,
    pub target_sizes: Vec<usize>,
    pub entries: Vec<Vec<usize>>,
}

impl InclusionMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.source_sizes.len()
    }

    /// `Λ·n_D = n_A`, the bookkeeping identity of a unital inclusion.
    pub fn is_consistent(&self) -> bool {
        self.entries.iter().zip(&self.target_sizes).all(|(row, &n)| {
            row.iter().zip(&self.source_sizes).map(|(m, s)| m * s).sum::<usize>() == n
        })
    }
}

/// Read off `Λ[i][j] = rank(p_i ι(q_j)) / n_j` from ranks of the images of
/// the minimal central projections.
pub fn inclusion_matrix(incl: &Inclusion) -> Result<InclusionMatrix, RfdError> {
    let report = incl.validate();
    if !report.is_ok() || report.zero_source {
        return Err(RfdError::InvalidInclusion(report));
    }
    let src = incl.source();
    let tgt = incl.target();
    let mut entries = vec![vec![0; src.num_blocks()]; tgt.num_blocks()];
    for j in 0..src.num_blocks() {
        let nj = src.block_sizes()[j];
        for (i, r) in incl.block_ranks(j).into_iter().enumerate() {
            if r % nj != 0 {
                return Err(RfdError::Fractional { block: j, target_block: i });
            }
            entries[i][j] = r / nj;
        }
    }
    Ok(InclusionMatrix { source_sizes: src.block_sizes().to_vec(), target_sizes: tgt.block_sizes().to_vec(), entries })
}

/// `s_D = Λᵀ s_A`.
pub fn restrict_trace(lambda: &InclusionMatrix, tau: &Trace) -> Result<Trace, RfdError> {
    if tau.algebra().block_sizes() != lambda.target_sizes.as_slice() {
        return Err(RfdError::ShapeMismatch(format!(
            "trace on {:?}, inclusion matrix into blocks {:?}",
            tau.algebra(),
            lambda.target_sizes
        )));
    }
    let s = (0..lambda.cols())
        .map(|j| {
            lambda
                .entries
                .iter()
                .zip(tau.weights())
                .map(|(row, s)| s * Rational::from_integer(BigInt::from(row[j])))
                .fold(Rational::zero(), |a, b| a + b)
        })
        .collect();
    let d = FdAlgebra::new(lambda.source_sizes.clone()).expect("sizes from an algebra");
    Ok(Trace::new(&d, s)?)
}

/// The system matrix `[Λ_Aᵀ, −Λ_Bᵀ]`.
pub fn trace_matching_system(la: &InclusionMatrix, lb: &InclusionMatrix) -> Result<RatMatrix, RfdError> {
    if la.source_sizes != lb.source_sizes {
        return Err(RfdError::ShapeMismatch(format!(
            "inclusion matrices over {:?} and {:?}",
            la.source_sizes, lb.source_sizes
        )));
    }
    let (ma, mb) = (la.rows(), lb.rows());
    Ok(RatMatrix::from_fn(la.cols(), ma + mb, |j, c| {
        if c < ma {
            GaussRational::from_int(la.entries[c][j] as i64)
        } else {
            GaussRational::from_int(-(lb.entries[c - ma][j] as i64))
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceMatching {
    Matched { tau_a: Trace, tau_b: Trace },
    Infeasible(StiemkeCertificate),
}

/// Strictly positive normalized `(s_A, s_B)` with `Λ_Aᵀ s_A = Λ_Bᵀ s_B`, or a
/// Stiemke certificate against the system.
pub fn solve_trace_matching(la: &InclusionMatrix, lb: &InclusionMatrix) -> Result<TraceMatching, RfdError> {
    let m = trace_matching_system(la, lb)?;
    let a = FdAlgebra::new(la.target_sizes.clone())?;
    let b = FdAlgebra::new(lb.target_sizes.clone())?;
    match strictly_positive_nullvector(&m).expect("integer system is real") {
        PositiveNullOutcome::Infeasible(c) => Ok(TraceMatching::Infeasible(c)),
        PositiveNullOutcome::Positive(x) => {
            let (xa, xb) = x.split_at(la.rows());
            let ta = Trace::new(&a, xa.to_vec())?;
            let tb = Trace::new(&b, xb.to_vec())?;
            // Both totals equal τ_D(1) because Λ·n_D = n.
            let (na, nb) = (ta.total(), tb.total());
            assert_eq!(na, nb, "unital bookkeeping forces equal totals");
            Ok(TraceMatching::Matched { tau_a: ta.normalized().expect("positive"), tau_b: tb.normalized().expect("positive") })
        }
    }
}

/// Smallest `k` with `k·s` integral, and `mult = k·s`.
pub fn integer_scaling(tau: &Trace) -> Result<(usize, Vec<usize>), RfdError> {
    if !tau.is_faithful() {
        return Err(RfdError::NotFaithful);
    }
    if !tau.is_state() {
        return Err(RfdError::NotNormalized(fdca_exact::format_rational(&tau.total())));
    }
    let k = tau.weights().iter().fold(BigInt::one(), |acc, s| acc.lcm(s.denom()));
    let to_usize = |v: &BigInt| v.to_usize().ok_or_else(|| RfdError::TooLarge(v.to_string()));
    let mult = tau
        .weights()
        .iter()
        .map(|s| to_usize(&(s * Rational::from_integer(k.clone())).to_integer()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((to_usize(&k)?, mult))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RfdWitness {
    pub tau_a: Trace,
    pub tau_b: Trace,
    /// Common restriction to `D`.
    pub tau_d: Trace,
    pub k: usize,
    pub mult_a: Vec<usize>,
    pub l: usize,
    pub mult_b: Vec<usize>,
}

impl RfdWitness {
    /// Unital embedding `A → M_k` pulling the normalized trace back to `τ_A`.
    pub fn embedding_a(&self) -> Inclusion {
        Inclusion::canonical(&[self.mult_a.clone()], self.tau_a.algebra(), &FdAlgebra::full(self.k))
            .expect("Σ multᵢ nᵢ = k")
    }

    pub fn embedding_b(&self) -> Inclusion {
        Inclusion::canonical(&[self.mult_b.clone()], self.tau_b.algebra(), &FdAlgebra::full(self.l))
            .expect("Σ multᵢ nᵢ = ℓ")
    }

    fn swapped(self) -> RfdWitness {
        RfdWitness {
            tau_a: self.tau_b,
            tau_b: self.tau_a,
            tau_d: self.tau_d,
            k: self.l,
            mult_a: self.mult_b,
            l: self.k,
            mult_b: self.mult_a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    #[serde(with = "rational_vec")]
    pub y: Vec<Rational>,
    /// The system `[Λ_Aᵀ, −Λ_Bᵀ]` the certificate refutes.
    pub system: Vec<Vec<String>>,
    /// `Mᵀy`, componentwise `≥ 0` and not all zero.
    #[serde(with = "rational_vec")]
    pub image: Vec<Rational>,
    pub theorem_backed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RfdDecision {
    pub rfd: bool,
    pub lambda_a: InclusionMatrix,
    pub lambda_b: InclusionMatrix,
    pub witness: Option<RfdWitness>,
    pub certificate: Option<CertificateReport>,
}

impl RfdDecision {
    pub fn stiemke(&self) -> Option<StiemkeCertificate> {
        self.certificate.as_ref().map(|c| StiemkeCertificate { y: c.y.clone() })
    }
}

/// Decide residual finite dimensionality from the lower row of `setup`.
///
/// The two sides are solved in a canonical order so that swapping `A` and
/// `B` swaps the witness exactly (and negates the certificate).
pub fn rfd_decide(setup: &AmalgamSetup) -> Result<RfdDecision, RfdError> {
    if setup.d().is_zero_algebra() {
        return Err(RfdError::ZeroAmalgam);
    }
    let la = inclusion_matrix(&setup.incl_a)?;
    let lb = inclusion_matrix(&setup.incl_b)?;
    let key = |l: &InclusionMatrix| (l.target_sizes.clone(), l.entries.clone());
    let flip = key(&la) > key(&lb);
    let (first, second) = if flip { (&lb, &la) } else { (&la, &lb) };

    let system = trace_matching_system(&la, &lb)?;
    match solve_trace_matching(first, second)? {
        TraceMatching::Matched { tau_a, tau_b } => {
            let tau_d = restrict_trace(first, &tau_a)?;
            assert_eq!(tau_d, restrict_trace(second, &tau_b)?, "witness traces agree on D");
            let (k, mult_a) = integer_scaling(&tau_a)?;
            let (l, mult_b) = integer_scaling(&tau_b)?;
            let w = RfdWitness { tau_a, tau_b, tau_d, k, mult_a, l, mult_b };
            let w = if flip { w.swapped() } else { w };
            Ok(RfdDecision { rfd: true, lambda_a: la, lambda_b: lb, witness: Some(w), certificate: None })
        }
        TraceMatching::Infeasible(c) => {
            let y: Vec<Rational> = if flip { c.y.iter().map(|v| -v).collect() } else { c.y };
            let cert = StiemkeCertificate { y: y.clone() };
            debug_assert!(cert.verify(&system));
            let real: Vec<Vec<Rational>> = system.to_rows().into_iter().map(|r| r.into_iter().map(|z| z.re).collect()).collect();
            let image = cert.image(&real);
            let system = real.iter().map(|r| r.iter().map(fdca_exact::format_rational).collect()).collect();
            Ok(RfdDecision {
                rfd: false,
                lambda_a: la,
                lambda_b: lb,
                witness: None,
                certificate: Some(CertificateReport { y, system, image, theorem_backed: true }),
            })
        }
    }
}

/// Independent re-check of a decision against its setup: traces positive,
/// normalized, restricting equally to `D`; embeddings valid and
/// trace-compatible; or the certificate valid against the system.
pub fn verify_decision(setup: &AmalgamSetup, dec: &RfdDecision) -> bool {
    let (Ok(la), Ok(lb)) = (inclusion_matrix(&setup.incl_a), inclusion_matrix(&setup.incl_b)) else {
        return false;
    };
    match (&dec.witness, &dec.certificate, dec.rfd) {
        (Some(w), None, true) => {
            let pos = |t: &Trace| t.weights().iter().all(Signed::is_positive) && t.is_state();
            let (Ok(da), Ok(db)) = (restrict_trace(&la, &w.tau_a), restrict_trace(&lb, &w.tau_b)) else {
                return false;
            };
            pos(&w.tau_a)
                && pos(&w.tau_b)
                && da == db
                && embedding_pulls_back(&w.embedding_a(), &w.tau_a)
                && embedding_pulls_back(&w.embedding_b(), &w.tau_b)
        }
        (None, Some(_), false) => {
            let Ok(m) = trace_matching_system(&la, &lb) else { return false };
            dec.stiemke().is_some_and(|c| c.verify(&m))
        }
        _ => false,
    }
}

/// The embedding is a valid unital *-hom and `tr_k ∘ ι = τ` on minimal projections.
pub fn embedding_pulls_back(incl: &Inclusion, tau: &Trace) -> bool {
    if !incl.validate().is_ok() {
        return false;
    }
    let k = incl.target().matrix_size();
    let tr = Trace::normalized_full(k);
    (0..incl.source().num_blocks()).all(|i| {
        let p = Element::matrix_unit(incl.source(), MatrixUnit::new(i, 0, 0));
        tr.apply(&incl.apply(&p)) == GaussRational::from_real(tau.weights()[i].clone())
    })
}
