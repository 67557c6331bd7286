//! Sufficient conditions for non-injectivity of `λ: A *_D B → Ã *_D̃ B̃`.
//!
//! The central quantity is the `D`-valued quadratic form
//!
//! ```text
//! E^B_D(b* ( E^A_D(d̃*a*ad̃) − E^A_D(d̃*a*a)d̃ − d̃*E^A_D(a*ad̃) + d̃*E^A_D(a*a)d̃ ) b)
//! ```
//!
//! which equals `⟨ξ, ξ⟩` for `ξ = (ad̃)^⊗b^ − a^⊗(d̃b)^` in `L²(A) ⊗_D L²(B)`.
//! When it is nonzero, `λ` kills a nonzero element.

use fdca_exact::{is_psd, GaussRational, RatMatrix};
use serde::Serialize;

use crate::algebra::{Element, FdAlgebra};
use crate::condexp::CondExp;
use crate::diagram::{AmalgamSetup, UpperRow};
use crate::error::AlgebraError;
use crate::unitization::unitize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertError {
    #[error("{0} is not in the lower algebra")]
    MembershipFailure(&'static str),
    #[error("D must be 0 or ℂ for this criterion, got {0}")]
    WrongDShape(String),
    #[error("the diagram has no upper row")]
    MissingUpperRow,
    #[error("element {0} is required for this criterion")]
    MissingElement(&'static str),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug)]
pub struct CertInput {
    pub setup: AmalgamSetup,
    /// `E^A_D: A → D`, its inclusion must be `ι_A`.
    pub e_a_d: CondExp,
    /// `E^B_D: B → D`, its inclusion must be `ι_B`.
    pub e_b_d: CondExp,
    pub a: Element,
    pub b: Element,
    pub dt: Element,
    pub a1: Option<Element>,
    pub a2: Option<Element>,
}

impl CertInput {
    pub fn new(
        setup: AmalgamSetup,
        e_a_d: CondExp,
        e_b_d: CondExp,
        a: Element,
        b: Element,
        dt: Element,
    ) -> Result<Self, CertError> {
        let upper = setup.upper.as_ref().ok_or(CertError::MissingUpperRow)?;
        if e_a_d.inclusion() != &setup.incl_a || e_b_d.inclusion() != &setup.incl_b {
            return Err(CertError::Shape("expectations must be onto the lower copies of D".into()));
        }
        for (name, x, alg) in [("a", &a, setup.a()), ("b", &b, setup.b()), ("dt", &dt, upper.dt())] {
            if x.algebra() != *alg {
                return Err(CertError::Shape(format!("{name} lives in {:?}, expected {alg:?}", x.algebra())));
            }
        }
        Ok(CertInput { setup, e_a_d, e_b_d, a, b, dt, a1: None, a2: None })
    }

    pub fn with_commutant_elements(mut self, a1: Element, a2: Element) -> Result<Self, CertError> {
        for x in [&a1, &a2] {
            if x.algebra() != *self.setup.a() {
                return Err(CertError::Shape(format!("a1/a2 must lie in {:?}", self.setup.a())));
            }
        }
        self.a1 = Some(a1);
        self.a2 = Some(a2);
        Ok(self)
    }

    fn upper(&self) -> &UpperRow {
        self.setup.upper.as_ref().expect("checked at construction")
    }

    /// `x·d̃` computed in `Ã` and pulled back to `A`.
    pub fn right_by_dt(&self, x: &Element) -> Option<Element> {
        let u = self.upper();
        u.lambda_a.preimage(&(&u.lambda_a.apply(x) * &u.phi_at.apply(&self.dt)))
    }

    /// `d̃·x` computed in `Ã` and pulled back to `A`.
    pub fn left_by_dt_a(&self, x: &Element) -> Option<Element> {
        let u = self.upper();
        u.lambda_a.preimage(&(&u.phi_at.apply(&self.dt) * &u.lambda_a.apply(x)))
    }

    /// `d̃·y` computed in `B̃` and pulled back to `B`.
    pub fn left_by_dt(&self, y: &Element) -> Option<Element> {
        let u = self.upper();
        u.lambda_b.preimage(&(&u.phi_bt.apply(&self.dt) * &u.lambda_b.apply(y)))
    }

    pub fn ad(&self) -> Result<Element, CertError> {
        self.right_by_dt(&self.a).ok_or(CertError::MembershipFailure("a·dt"))
    }

    pub fn db(&self) -> Result<Element, CertError> {
        self.left_by_dt(&self.b).ok_or(CertError::MembershipFailure("dt·b"))
    }
}

/// `⟨x^⊗y^, x′^⊗y′^⟩ = E^B_D(y* ι_B(E^A_D(x*x′)) y′)`, an element of `D`.
pub fn pair_two_tensor(x: &Element, y: &Element, x2: &Element, y2: &Element, e_a_d: &CondExp, e_b_d: &CondExp) -> Element {
    let inner_b = e_b_d.inclusion().apply(&e_a_d.project(&(&x.adjoint() * x2)));
    e_b_d.project(&(&(&y.adjoint() * &inner_b) * y2))
}

/// The quadratic form, evaluated term by term through `D̃`, `B̃` and back.
pub fn econd_form(input: &CertInput) -> Result<Element, CertError> {
    let ad = input.ad()?;
    input.db()?;
    let up = input.upper();
    let (a, dt) = (&input.a, &input.dt);
    let e = |x: &Element| up.lambda_d.apply(&input.e_a_d.project(x));
    let dt_star = dt.adjoint();
    let a_star_a = &a.adjoint() * a;
    // E^A_D(d̃*a*a) = E^A_D((ad̃)*a), E^A_D(a*ad̃) = E^A_D(a*(ad̃))
    let t1 = e(&(&ad.adjoint() * &ad));
    let t2 = &e(&(&ad.adjoint() * a)) * dt;
    let t3 = &dt_star * &e(&(&a.adjoint() * &ad));
    let t4 = &(&dt_star * &e(&a_star_a)) * dt;
    let bracket = &(&(&t1 - &t2) - &t3) + &t4;
    let lb = up.lambda_b.apply(&input.b);
    let sandwich = &(&lb.adjoint() * &up.phi_bt.apply(&bracket)) * &lb;
    let pulled = up
        .lambda_b
        .preimage(&sandwich)
        .expect("each term lies in B once dt·b does");
    Ok(input.e_b_d.project(&pulled))
}

/// `⟨ξ, ξ⟩` via four pairings.
pub fn econd_four_term(input: &CertInput) -> Result<Element, CertError> {
    let ad = input.ad()?;
    let db = input.db()?;
    let (a, b) = (&input.a, &input.b);
    let p = |x: &Element, y: &Element, x2: &Element, y2: &Element| pair_two_tensor(x, y, x2, y2, &input.e_a_d, &input.e_b_d);
    let v = &(&(&p(&ad, b, &ad, b) - &p(&ad, b, a, &db)) - &p(a, &db, &ad, b)) + &p(a, &db, a, &db);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    NonInjective,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertVerdict {
    pub variant: &'static str,
    /// The quadratic form, when the membership conditions allow evaluating it.
    pub value: Option<Element>,
    pub nonzero: Option<bool>,
    pub psd: Option<bool>,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Conclusion,
}

fn element_is_psd(x: &Element) -> bool {
    x.blocks().iter().all(|b| is_psd(b).expect("value is self-adjoint"))
}

fn value_fields(input: &CertInput) -> (Option<Element>, Option<bool>, Option<bool>) {
    match econd_form(input) {
        Ok(v) => {
            let nz = !v.is_zero();
            let psd = v.is_self_adjoint() && element_is_psd(&v);
            (Some(v), Some(nz), Some(psd))
        }
        Err(_) => (None, None, None),
    }
}

fn verdict(variant: &'static str, input: &CertInput, hypotheses: Vec<Hypothesis>) -> CertVerdict {
    let (value, nonzero, psd) = value_fields(input);
    let conclusion = if hypotheses.iter().all(|h| h.passed) { Conclusion::NonInjective } else { Conclusion::Inconclusive };
    CertVerdict { variant, value, nonzero, psd, hypotheses, conclusion }
}

/// Evaluate the quadratic form; nonzero means `λ` is not injective.
pub fn econd_value(input: &CertInput) -> Result<CertVerdict, CertError> {
    let v = econd_form(input)?;
    let nz = !v.is_zero();
    let psd = v.is_self_adjoint() && element_is_psd(&v);
    Ok(CertVerdict {
        variant: "econd",
        value: Some(v),
        nonzero: Some(nz),
        psd: Some(psd),
        hypotheses: vec![
            Hypothesis { name: "a_dt_in_A", passed: true },
            Hypothesis { name: "dt_b_in_B", passed: true },
            Hypothesis { name: "form_nonzero", passed: nz },
        ],
        conclusion: if nz { Conclusion::NonInjective } else { Conclusion::Inconclusive },
    })
}

fn span_rank(vs: &[Vec<GaussRational>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    RatMatrix::from_fn(vs.len(), vs[0].len(), |i, j| vs[i][j].clone()).rank()
}

/// `D(d̃b) ∩ Db = {0}`, `E^A_D((ad̃)*(ad̃))·b ≠ 0`, and `E^B_D` faithful.
pub fn check_prop_noninj(input: &CertInput) -> CertVerdict {
    let ad = input.ad().ok();
    let db = input.db().ok();
    let d = input.setup.d();
    let ib = &input.setup.incl_b;

    let eq_db = db.as_ref().map(|db| {
        let d_units: Vec<Element> = d.units().map(|u| ib.apply(&Element::matrix_unit(d, u))).collect();
        let v1: Vec<_> = d_units.iter().map(|q| (q * db).coords()).collect();
        let v2: Vec<_> = d_units.iter().map(|q| (q * &input.b).coords()).collect();
        let both: Vec<_> = v1.iter().chain(&v2).cloned().collect();
        span_rank(&both) == span_rank(&v1) + span_rank(&v2)
    });
    let eq_eda = ad.as_ref().map(|ad| {
        let e = ib.apply(&input.e_a_d.project(&(&ad.adjoint() * ad)));
        !(&e * &input.b).is_zero()
    });
    let hyps = vec![
        Hypothesis { name: "a_dt_in_A", passed: ad.is_some() },
        Hypothesis { name: "dt_b_in_B", passed: db.is_some() },
        Hypothesis { name: "intersection_trivial", passed: eq_db.unwrap_or(false) },
        Hypothesis { name: "expectation_times_b_nonzero", passed: eq_eda.unwrap_or(false) },
        Hypothesis { name: "e_b_d_faithful", passed: input.e_b_d.is_faithful() },
    ];
    verdict("prop", input, hyps)
}

fn require_scalar_or_zero(d: &FdAlgebra) -> Result<(), CertError> {
    if d.is_scalars() || d.is_zero_algebra() {
        Ok(())
    } else {
        Err(CertError::WrongDShape(format!("{d:?}")))
    }
}

/// For `D ∈ {0, ℂ}`: `ad̃ ∈ A∖{0}`, `d̃b ∈ B`, `d̃b ∉ ℂb`.
pub fn check_cor_scalar_d(input: &CertInput) -> Result<CertVerdict, CertError> {
    require_scalar_or_zero(input.setup.d())?;
    let ad = input.ad().ok();
    let db = input.db().ok();
    let independent = db.as_ref().is_some_and(|db| span_rank(&[input.b.coords(), db.coords()]) == 2);
    let hyps = vec![
        Hypothesis { name: "a_dt_in_A", passed: ad.is_some() },
        Hypothesis { name: "a_dt_nonzero", passed: ad.as_ref().is_some_and(|x| !x.is_zero()) },
        Hypothesis { name: "dt_b_in_B", passed: db.is_some() },
        Hypothesis { name: "dt_b_not_in_cb", passed: independent },
    ];
    Ok(verdict("cor", input, hyps))
}

/// For `D ∈ {0, ℂ}`: `a₁d̃, d̃a₂ ∈ A`, `a₁d̃ ∉ ℂ`, `b ∉ D`, `d̃b = bd̃`.
///
/// "`∉ ℂ`" is read in the unitization when `D = 0`, where the scalars meet
/// `A` only in zero.
pub fn check_commutant_variant(input: &CertInput) -> Result<CertVerdict, CertError> {
    let d = input.setup.d();
    require_scalar_or_zero(d)?;
    let a1 = input.a1.as_ref().ok_or(CertError::MissingElement("a1"))?;
    let a2 = input.a2.as_ref().ok_or(CertError::MissingElement("a2"))?;
    let up = input.upper();
    let a1d = input.right_by_dt(a1);
    let da2 = input.left_by_dt_a(a2);
    let not_scalar = a1d.as_ref().is_some_and(|x| {
        if d.is_zero_algebra() {
            let u = unitize(input.setup.a());
            u.to_direct_sum(&u.embed(x)).as_scalar().is_none()
        } else {
            x.as_scalar().is_none()
        }
    });
    let b_outside_d = input.setup.incl_b.preimage(&input.b).is_none();
    let lb = up.lambda_b.apply(&input.b);
    let dtb = up.phi_bt.apply(&input.dt);
    let commute = &dtb * &lb == &lb * &dtb;
    let hyps = vec![
        Hypothesis { name: "a1_dt_in_A", passed: a1d.is_some() },
        Hypothesis { name: "dt_a2_in_A", passed: da2.is_some() },
        Hypothesis { name: "a1_dt_not_scalar", passed: not_scalar },
        Hypothesis { name: "b_not_in_D", passed: b_outside_d },
        Hypothesis { name: "dt_b_commute", passed: commute },
    ];
    Ok(verdict("commutant", input, hyps))
}
