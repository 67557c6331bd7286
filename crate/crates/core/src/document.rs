//! The JSON input document shared by all commands.
//!
//! Objects are declared in named maps and referenced by name:
//!
//! ```json
//! {
//!   "algebras":   {"D": {"blocks": [1]}, "A": {"blocks": [2]}},
//!   "inclusions": {"iA": {"source": "D", "target": "A", "multiplicities": [[2]]}},
//!   "traces":     {"tA": {"algebra": "A", "s": ["1/2"]}},
//!   "expectations": {"EA": {"inclusion": "iA", "trace": "tA"}},
//!   "elements":   {"a": {"algebra": "A", "blocks": [[["1","0"],["0","0"]]]}},
//!   "diagram":    {"incl_a": "iA", "incl_b": "iA"}
//! }
//! ```
//!
//! Inclusions may instead list `"images": {"k,i,j": {"blocks": …}}` for every
//! source matrix unit.

use std::collections::BTreeMap;

use fdca_exact::scalar::rational_vec;
use fdca_exact::{RatMatrix, Rational};
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, FdAlgebra, MatrixUnit};
use crate::cert::{CertError, CertInput};
use crate::condexp::CondExp;
use crate::diagram::{AmalgamSetup, Expectations, UpperRow};
use crate::error::AlgebraError;
use crate::inclusion::{Inclusion, StarHomReport};
use crate::trace::Trace;

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },
    #[error("document has no {0}")]
    Missing(&'static str),
    #[error("inclusion {name:?}: {source}")]
    BadInclusion { name: String, source: AlgebraError },
    #[error("invalid *-homomorphisms: {}", .0.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", "))]
    InvalidInclusions(Vec<(String, StarHomReport)>),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

impl DocumentError {
    /// Errors that mean "well-formed input, but the mathematics fails".
    pub fn is_validation_failure(&self) -> bool {
        matches!(self, DocumentError::InvalidInclusions(_))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInclusion {
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub multiplicities: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub images: Option<BTreeMap<String, Element>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTrace {
    pub algebra: String,
    #[serde(with = "rational_vec")]
    pub s: Vec<Rational>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExpectation {
    pub inclusion: String,
    /// Trace on the inclusion's target; the default trace when absent.
    #[serde(default)]
    pub trace: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawElement {
    pub algebra: String,
    pub blocks: Vec<RatMatrix>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExpectations {
    pub e_a: String,
    pub e_b: String,
    pub e_d: String,
}

/// Lower row, plus an optional upper row. With only `lambda_a`/`lambda_b`
/// given, the upper row has `D̃ = D`, `λ_D = id`, `φ_Ã = λ_A∘ι_A`, `φ_B̃ = λ_B∘ι_B`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDiagram {
    pub incl_a: String,
    pub incl_b: String,
    #[serde(default)]
    pub lambda_a: Option<String>,
    #[serde(default)]
    pub lambda_b: Option<String>,
    #[serde(default)]
    pub lambda_d: Option<String>,
    #[serde(default)]
    pub phi_at: Option<String>,
    #[serde(default)]
    pub phi_bt: Option<String>,
    #[serde(default)]
    pub expectations: Option<RawExpectations>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCert {
    pub a: String,
    pub b: String,
    pub dt: String,
    pub e_a_d: String,
    pub e_b_d: String,
    #[serde(default)]
    pub a1: Option<String>,
    #[serde(default)]
    pub a2: Option<String>,
}

/// Tower parameters. Representations are given as inclusions into a full
/// matrix algebra `M_h`; when absent in equal-D mode they are built from the
/// residual finite dimensionality witness.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSection {
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub pi_a: Option<String>,
    #[serde(default)]
    pub pi_b: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    #[serde(default)]
    pub algebras: BTreeMap<String, FdAlgebra>,
    #[serde(default)]
    pub inclusions: BTreeMap<String, RawInclusion>,
    #[serde(default)]
    pub traces: BTreeMap<String, RawTrace>,
    #[serde(default)]
    pub expectations: BTreeMap<String, RawExpectation>,
    #[serde(default)]
    pub elements: BTreeMap<String, RawElement>,
    #[serde(default)]
    pub diagram: Option<RawDiagram>,
    #[serde(default)]
    pub cert: Option<RawCert>,
    #[serde(default)]
    pub tower: Option<TowerSection>,
}

/// A document with every name resolved to a value.
#[derive(Debug, Clone)]
pub struct Document {
    pub algebras: BTreeMap<String, FdAlgebra>,
    pub inclusions: BTreeMap<String, Inclusion>,
    pub traces: BTreeMap<String, Trace>,
    pub expectations: BTreeMap<String, CondExp>,
    pub elements: BTreeMap<String, Element>,
    pub diagram: Option<RawDiagram>,
    pub cert: Option<RawCert>,
    pub tower: Option<TowerSection>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T, DocumentError> {
    map.get(name).ok_or_else(|| DocumentError::UnknownName { kind, name: name.to_string() })
}

impl Document {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let raw: RawDocument = serde_json::from_str(text)?;
        Self::resolve(raw)
    }

    pub fn resolve(raw: RawDocument) -> Result<Self, DocumentError> {
        let algebras = raw.algebras;
        let mut inclusions = BTreeMap::new();
        for (name, r) in &raw.inclusions {
            let src = lookup(&algebras, "algebra", &r.source)?;
            let tgt = lookup(&algebras, "algebra", &r.target)?;
            let bad = |source| DocumentError::BadInclusion { name: name.clone(), source };
            let incl = match (&r.multiplicities, &r.images) {
                (Some(m), None) => Inclusion::canonical(m, src, tgt).map_err(bad)?,
                (None, Some(imgs)) => {
                    let mut by_unit = BTreeMap::new();
                    for (id, e) in imgs {
                        let u = MatrixUnit::parse_id(id)
                            .filter(|u| src.contains_unit(*u))
                            .ok_or_else(|| bad(AlgebraError::ElementShape(format!("bad matrix unit id {id:?}"))))?;
                        by_unit.insert(u, e.clone());
                    }
                    let images = src
                        .units()
                        .map(|u| {
                            by_unit
                                .remove(&u)
                                .ok_or_else(|| bad(AlgebraError::ElementShape(format!("no image for unit {}", u.id()))))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    for e in &images {
                        Element::from_blocks(tgt, e.blocks().to_vec()).map_err(bad)?;
                    }
                    Inclusion::new(src.clone(), tgt.clone(), images).map_err(bad)?
                }
                _ => {
                    return Err(bad(AlgebraError::DimensionMismatch(
                        "give exactly one of multiplicities or images".into(),
                    )))
                }
            };
            inclusions.insert(name.clone(), incl);
        }
        let mut traces = BTreeMap::new();
        for (name, r) in &raw.traces {
            let alg = lookup(&algebras, "algebra", &r.algebra)?;
            traces.insert(name.clone(), Trace::new(alg, r.s.clone())?);
        }
        let mut expectations = BTreeMap::new();
        for (name, r) in &raw.expectations {
            let incl = lookup(&inclusions, "inclusion", &r.inclusion)?;
            let e = match &r.trace {
                Some(t) => CondExp::trace_preserving(incl, lookup(&traces, "trace", t)?)?,
                None => CondExp::canonical(incl),
            };
            expectations.insert(name.clone(), e);
        }
        let mut elements = BTreeMap::new();
        for (name, r) in &raw.elements {
            let alg = lookup(&algebras, "algebra", &r.algebra)?;
            elements.insert(name.clone(), Element::from_blocks(alg, r.blocks.clone())?);
        }
        Ok(Document {
            algebras,
            inclusions,
            traces,
            expectations,
            elements,
            diagram: raw.diagram,
            cert: raw.cert,
            tower: raw.tower,
        })
    }

    pub fn inclusion(&self, name: &str) -> Result<&Inclusion, DocumentError> {
        lookup(&self.inclusions, "inclusion", name)
    }

    pub fn element(&self, name: &str) -> Result<&Element, DocumentError> {
        lookup(&self.elements, "element", name)
    }

    pub fn expectation(&self, name: &str) -> Result<&CondExp, DocumentError> {
        lookup(&self.expectations, "expectation", name)
    }

    /// Star-homomorphism reports for every declared inclusion, by name.
    pub fn inclusion_reports(&self) -> Vec<(String, StarHomReport)> {
        self.inclusions.iter().map(|(n, i)| (n.clone(), i.validate())).collect()
    }

    /// Fail unless every declared inclusion is a valid *-homomorphism.
    pub fn require_valid_inclusions(&self) -> Result<(), DocumentError> {
        let bad: Vec<_> = self.inclusion_reports().into_iter().filter(|(_, r)| !r.is_ok()).collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(DocumentError::InvalidInclusions(bad))
        }
    }

    pub fn setup(&self) -> Result<AmalgamSetup, DocumentError> {
        let d = self.diagram.as_ref().ok_or(DocumentError::Missing("diagram"))?;
        let ia = self.inclusion(&d.incl_a)?.clone();
        let ib = self.inclusion(&d.incl_b)?.clone();
        let setup = AmalgamSetup::new(ia.clone(), ib.clone())?;
        let (Some(la), Some(lb)) = (&d.lambda_a, &d.lambda_b) else {
            return Ok(setup);
        };
        let la = self.inclusion(la)?.clone();
        let lb = self.inclusion(lb)?.clone();
        let upper = match (&d.lambda_d, &d.phi_at, &d.phi_bt) {
            (Some(ld), Some(pa), Some(pb)) => UpperRow {
                lambda_a: la,
                lambda_b: lb,
                lambda_d: self.inclusion(ld)?.clone(),
                phi_at: self.inclusion(pa)?.clone(),
                phi_bt: self.inclusion(pb)?.clone(),
            },
            (None, None, None) => UpperRow {
                phi_at: ia.then(&la)?,
                phi_bt: ib.then(&lb)?,
                lambda_d: Inclusion::identity(ia.source()),
                lambda_a: la,
                lambda_b: lb,
            },
            _ => return Err(DocumentError::Missing("complete upper row (lambda_d, phi_at, phi_bt)")),
        };
        Ok(setup.with_upper(upper)?)
    }

    pub fn diagram_expectations(&self) -> Result<Option<Expectations>, DocumentError> {
        let Some(d) = &self.diagram else { return Ok(None) };
        let Some(e) = &d.expectations else { return Ok(None) };
        Ok(Some(Expectations {
            e_a: self.expectation(&e.e_a)?.clone(),
            e_b: self.expectation(&e.e_b)?.clone(),
            e_d: self.expectation(&e.e_d)?.clone(),
        }))
    }

    pub fn cert_input(&self) -> Result<CertInput, DocumentError> {
        let c = self.cert.as_ref().ok_or(DocumentError::Missing("cert section"))?;
        let input = CertInput::new(
            self.setup()?,
            self.expectation(&c.e_a_d)?.clone(),
            self.expectation(&c.e_b_d)?.clone(),
            self.element(&c.a)?.clone(),
            self.element(&c.b)?.clone(),
            self.element(&c.dt)?.clone(),
        )?;
        match (&c.a1, &c.a2) {
            (Some(a1), Some(a2)) => {
                Ok(input.with_commutant_elements(self.element(a1)?.clone(), self.element(a2)?.clone())?)
            }
            (None, None) => Ok(input),
            _ => Err(DocumentError::Missing("both a1 and a2")),
        }
    }
}
