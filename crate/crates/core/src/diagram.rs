//! The two-row diagram
//!
//! ```text
//!   Ã ←φ_Ã─ D̃ ─φ_B̃→ B̃
//!   ↑λ_A    ↑λ_D    ↑λ_B
//!   A ←ι_A─ D ─ι_B→ B
//! ```
//!
//! and the checks that it commutes, with or without expectations.

use serde::Serialize;

use crate::algebra::{Element, FdAlgebra};
use crate::condexp::CondExp;
use crate::error::AlgebraError;
use crate::inclusion::{Inclusion, StarHomReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperRow {
    pub lambda_a: Inclusion,
    pub lambda_b: Inclusion,
    pub lambda_d: Inclusion,
    pub phi_at: Inclusion,
    pub phi_bt: Inclusion,
}

impl UpperRow {
    pub fn dt(&self) -> &FdAlgebra {
        self.lambda_d.target()
    }

    pub fn at(&self) -> &FdAlgebra {
        self.lambda_a.target()
    }

    pub fn bt(&self) -> &FdAlgebra {
        self.lambda_b.target()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamSetup {
    pub incl_a: Inclusion,
    pub incl_b: Inclusion,
    pub upper: Option<UpperRow>,
}

/// `E_A: Ã → A`, `E_B: B̃ → B`, `E_D: D̃ → D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectations {
    pub e_a: CondExp,
    pub e_b: CondExp,
    pub e_d: CondExp,
}

impl AmalgamSetup {
    pub fn new(incl_a: Inclusion, incl_b: Inclusion) -> Result<Self, AlgebraError> {
        if incl_a.source() != incl_b.source() {
            return Err(AlgebraError::Incompatible(format!(
                "inclusions start at {:?} and {:?}",
                incl_a.source(),
                incl_b.source()
            )));
        }
        Ok(AmalgamSetup { incl_a, incl_b, upper: None })
    }

    /// Attach the upper row, checking that every arrow starts and ends where
    /// the diagram says. Commutativity is left to [`validate_diagram`].
    pub fn with_upper(mut self, upper: UpperRow) -> Result<Self, AlgebraError> {
        let checks = [
            ("lambda_a source", upper.lambda_a.source(), self.incl_a.target()),
            ("lambda_b source", upper.lambda_b.source(), self.incl_b.target()),
            ("lambda_d source", upper.lambda_d.source(), self.incl_a.source()),
            ("phi_at source", upper.phi_at.source(), upper.lambda_d.target()),
            ("phi_bt source", upper.phi_bt.source(), upper.lambda_d.target()),
            ("phi_at target", upper.phi_at.target(), upper.lambda_a.target()),
            ("phi_bt target", upper.phi_bt.target(), upper.lambda_b.target()),
        ];
        for (what, got, want) in checks {
            if got != want {
                return Err(AlgebraError::Incompatible(format!("{what}: {got:?}, expected {want:?}")));
            }
        }
        self.upper = Some(upper);
        Ok(self)
    }

    pub fn d(&self) -> &FdAlgebra {
        self.incl_a.source()
    }

    pub fn a(&self) -> &FdAlgebra {
        self.incl_a.target()
    }

    pub fn b(&self) -> &FdAlgebra {
        self.incl_b.target()
    }

    /// Swap the roles of `A` and `B`.
    pub fn swapped(&self) -> AmalgamSetup {
        AmalgamSetup {
            incl_a: self.incl_b.clone(),
            incl_b: self.incl_a.clone(),
            upper: self.upper.as_ref().map(|u| UpperRow {
                lambda_a: u.lambda_b.clone(),
                lambda_b: u.lambda_a.clone(),
                lambda_d: u.lambda_d.clone(),
                phi_at: u.phi_bt.clone(),
                phi_bt: u.phi_at.clone(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareFailure {
    /// `"A"` or `"B"`.
    pub side: &'static str,
    /// Matrix unit of the source (`D` for the inclusion squares, `D̃` for the
    /// expectation squares) where the two routes disagree.
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    pub star_hom: Vec<(String, StarHomReport)>,
    pub inclusion_squares: Vec<SquareFailure>,
    /// `None` when no expectations were supplied.
    pub expectation_squares: Option<Vec<SquareFailure>>,
    pub expectation_mismatch: Vec<String>,
    pub ok: bool,
}

/// Check the upper-row arrows are *-homomorphisms, that
/// `φ_Ã∘λ_D = λ_A∘ι_A` and `φ_B̃∘λ_D = λ_B∘ι_B` on every matrix unit of `D`,
/// and, given expectations, that `E_A∘φ_Ã = ι_A∘E_D` and
/// `E_B∘φ_B̃ = ι_B∘E_D` on every matrix unit of `D̃`.
pub fn validate_diagram(setup: &AmalgamSetup, exps: Option<&Expectations>) -> Result<DiagramReport, AlgebraError> {
    let upper = setup
        .upper
        .as_ref()
        .ok_or_else(|| AlgebraError::Incompatible("diagram has no upper row".into()))?;
    let arrows = [
        ("incl_a", &setup.incl_a),
        ("incl_b", &setup.incl_b),
        ("lambda_a", &upper.lambda_a),
        ("lambda_b", &upper.lambda_b),
        ("lambda_d", &upper.lambda_d),
        ("phi_at", &upper.phi_at),
        ("phi_bt", &upper.phi_bt),
    ];
    let star_hom: Vec<(String, StarHomReport)> = arrows.iter().map(|(n, i)| (n.to_string(), i.validate())).collect();

    let d = setup.d();
    let mut inclusion_squares = Vec::new();
    for u in d.units() {
        let x = Element::matrix_unit(d, u);
        let dt = upper.lambda_d.apply(&x);
        if upper.phi_at.apply(&dt) != upper.lambda_a.apply(&setup.incl_a.apply(&x)) {
            inclusion_squares.push(SquareFailure { side: "A", unit: u.id() });
        }
        if upper.phi_bt.apply(&dt) != upper.lambda_b.apply(&setup.incl_b.apply(&x)) {
            inclusion_squares.push(SquareFailure { side: "B", unit: u.id() });
        }
    }

    let mut expectation_mismatch = Vec::new();
    let expectation_squares = exps.map(|e| {
        for (name, got, want) in [
            ("e_a", e.e_a.inclusion(), &upper.lambda_a),
            ("e_b", e.e_b.inclusion(), &upper.lambda_b),
            ("e_d", e.e_d.inclusion(), &upper.lambda_d),
        ] {
            if got != want {
                expectation_mismatch.push(name.to_string());
            }
        }
        if !expectation_mismatch.is_empty() {
            return Vec::new();
        }
        let dt = upper.dt();
        let mut fails = Vec::new();
        for u in dt.units() {
            let x = Element::matrix_unit(dt, u);
            let ed = e.e_d.project(&x);
            if e.e_a.project(&upper.phi_at.apply(&x)) != setup.incl_a.apply(&ed) {
                fails.push(SquareFailure { side: "A", unit: u.id() });
            }
            if e.e_b.project(&upper.phi_bt.apply(&x)) != setup.incl_b.apply(&ed) {
                fails.push(SquareFailure { side: "B", unit: u.id() });
            }
        }
        fails
    });

    let ok = star_hom.iter().all(|(_, r)| r.is_ok())
        && inclusion_squares.is_empty()
        && expectation_mismatch.is_empty()
        && expectation_squares.as_ref().map_or(true, Vec::is_empty);
    Ok(DiagramReport { star_hom, inclusion_squares, expectation_squares, expectation_mismatch, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nested() -> AmalgamSetup {
        // ℂ ⊆ ℂ² ⊆ M₂ on both sides, A = B = M₂ = Ã = B̃.
        let c = FdAlgebra::full(1);
        let c2 = FdAlgebra::abelian(2);
        let m2 = FdAlgebra::full(2);
        let ia = Inclusion::canonical(&[vec![2]], &c, &m2).unwrap();
        let ld = Inclusion::canonical(&[vec![1], vec![1]], &c, &c2).unwrap();
        let phi = Inclusion::canonical(&[vec![1, 1]], &c2, &m2).unwrap();
        AmalgamSetup::new(ia.clone(), ia)
            .unwrap()
            .with_upper(UpperRow {
                lambda_a: Inclusion::identity(&m2),
                lambda_b: Inclusion::identity(&m2),
                lambda_d: ld,
                phi_at: phi.clone(),
                phi_bt: phi,
            })
            .unwrap()
    }

    #[test]
    fn nested_canonical_inclusions_commute() {
        let r = validate_diagram(&nested(), None).unwrap();
        assert!(r.ok, "{r:?}");
        assert!(r.expectation_squares.is_none());
    }

    #[test]
    fn swapped_blocks_are_localized() {
        // Ã = M₂ ⊕ ℂ ⊇ D̃ = ℂ²; φ_Ã sends the D̃ blocks to different places on
        // the two sides while D = ℂ² sits diagonally.
        let c2 = FdAlgebra::abelian(2);
        let at = FdAlgebra::new(vec![2, 1]).unwrap();
        let a = FdAlgebra::new(vec![1, 1]).unwrap();
        let ia = Inclusion::identity(&c2);
        let la = Inclusion::canonical(&[vec![1, 1], vec![1, 0]], &a, &at).unwrap();
        let phi_good = la.clone();
        let phi_swapped = Inclusion::canonical(&[vec![1, 1], vec![0, 1]], &c2, &at).unwrap();
        let setup = AmalgamSetup::new(ia.clone(), ia)
            .unwrap()
            .with_upper(UpperRow {
                lambda_a: la.clone(),
                lambda_b: la,
                lambda_d: Inclusion::identity(&c2),
                phi_at: phi_good,
                phi_bt: phi_swapped,
            })
            .unwrap();
        let r = validate_diagram(&setup, None).unwrap();
        assert!(!r.ok);
        assert_eq!(
            r.inclusion_squares,
            vec![SquareFailure { side: "B", unit: "0,0,0".into() }, SquareFailure { side: "B", unit: "1,0,0".into() }]
        );
    }

    #[test]
    fn trace_preserving_expectations_fail_on_the_scalar_fixture() {
        let s = nested();
        let up = s.upper.clone().unwrap();
        let exps = Expectations {
            e_a: CondExp::canonical(&up.lambda_a),
            e_b: CondExp::canonical(&up.lambda_b),
            e_d: CondExp::canonical(&up.lambda_d),
        };
        let r = validate_diagram(&s, Some(&exps)).unwrap();
        assert!(r.inclusion_squares.is_empty());
        assert!(!r.ok);
        assert!(!r.expectation_squares.unwrap().is_empty());
    }
}
