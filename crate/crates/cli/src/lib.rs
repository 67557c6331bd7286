//! Command dispatch for the `fdca` binary.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | computed (for `tower`: all residuals within tolerance) |
//! | 2 | invalid input: unreadable or malformed document, unknown names, wrong shapes, missing sections |
//! | 3 | validation failure: an inclusion is not a `*`-homomorphism, the diagram does not commute, or input representations disagree on `D` |
//! | 4 | tower residual above tolerance, or numerical breakdown while building it |

use std::fmt;

use clap::{Parser, Subcommand, ValueEnum};
use fdca::cert::{
    check_commutant_variant, check_cor_scalar_d, check_prop_noninj, econd_four_term, econd_value, CertError,
    CertVerdict,
};
use fdca::document::{Document, DocumentError};
use fdca::rfd::verify_decision;
use fdca::{rfd_decide, validate_diagram, Element, RfdError};
use fdca_dilation::{
    build_tower_condexp, build_tower_equal_d, common_representation, DilationError, Representation,
    DEFAULT_TOLERANCE,
};
use fdca_exact::{format_rational, GaussRational};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_DEPTH: usize = 2;

#[derive(Parser, Debug)]
#[command(name = "fdca", version, about = "Amalgamated free products of finite-dimensional C*-algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Read the document from this path instead of stdin.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide residual finite dimensionality of A *_D B.
    Rfd,
    /// Evaluate a non-injectivity criterion for the upper-row inclusion.
    Cert {
        #[arg(long, value_enum, default_value_t = Variant::Econd)]
        variant: Variant,
    },
    /// Build and verify a truncated dilation tower.
    Tower {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum)]
        mode: Option<TowerMode>,
    },
    /// Check inclusions and diagram commutativity only.
    Validate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Econd,
    Prop,
    Cor,
    Commutant,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerMode {
    #[value(name = "equalD")]
    EqualD,
    #[value(name = "condexp")]
    Condexp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Invalid = 2,
    Validation = 3,
    Residual = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A finished command: the JSON report and its exit code.
#[derive(Debug)]
pub struct Outcome {
    pub exit: Exit,
    pub report: Value,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
    pub detail: Value,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Failure {
    fn new(exit: Exit, message: impl ToString) -> Self {
        Failure { exit, message: message.to_string(), detail: Value::Null }
    }

    fn with_detail(mut self, detail: impl Serialize) -> Self {
        self.detail = serde_json::to_value(detail).unwrap_or(Value::Null);
        self
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::InvalidInclusions(bad) => {
                let detail: Vec<Value> = bad.iter().map(|(n, r)| json!({"name": n, "report": r})).collect();
                Failure::new(Exit::Validation, "invalid *-homomorphisms").with_detail(detail)
            }
            other => Failure::new(Exit::Invalid, other),
        }
    }
}

impl From<RfdError> for Failure {
    fn from(e: RfdError) -> Self {
        match e {
            RfdError::InvalidInclusion(r) => Failure::new(Exit::Validation, "invalid inclusion").with_detail(r),
            other => Failure::new(Exit::Invalid, other),
        }
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        match e {
            CertError::MembershipFailure(_) => Failure::new(Exit::Validation, e),
            other => Failure::new(Exit::Invalid, other),
        }
    }
}

impl From<DilationError> for Failure {
    fn from(e: DilationError) -> Self {
        match e {
            DilationError::DiagramFailure(r) => Failure::new(Exit::Validation, "diagram does not commute").with_detail(*r),
            DilationError::DAgreementFailure(_) => Failure::new(Exit::Validation, e),
            DilationError::Shape(_) | DilationError::Algebra(_) => Failure::new(Exit::Invalid, e),
            DilationError::NotAState(_) | DilationError::NotUnitalRep(_) | DilationError::Numerical(_) => {
                Failure::new(Exit::Residual, e)
            }
        }
    }
}

pub fn digest(input: &str) -> String {
    hex::encode(Sha256::digest(input.as_bytes()))
}

/// `"p/q"` for a real scalar, `{"re", "im"}` otherwise.
pub fn scalar_json(z: &GaussRational) -> Value {
    if z.is_real() {
        Value::String(format_rational(&z.re))
    } else {
        serde_json::to_value(z).expect("scalars serialize")
    }
}

fn envelope(command: &str, input: &str, body: Value) -> Value {
    let mut v = json!({"command": command, "version": VERSION, "input_sha256": digest(input)});
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

/// Runs one command on the document text.
pub fn run(command: &Command, input: &str) -> Outcome {
    let name = match command {
        Command::Rfd => "rfd",
        Command::Cert { .. } => "cert",
        Command::Tower { .. } => "tower",
        Command::Validate => "validate",
    };
    let result = Document::from_json(input).map_err(Failure::from).and_then(|doc| match command {
        Command::Rfd => cmd_rfd(&doc),
        Command::Cert { variant } => cmd_cert(&doc, *variant),
        Command::Tower { depth, tol, mode } => cmd_tower(&doc, *depth, *tol, *mode),
        Command::Validate => cmd_validate(&doc),
    });
    match result {
        Ok((exit, body)) => Outcome { exit, report: envelope(name, input, body) },
        Err(f) => Outcome {
            exit: f.exit,
            report: envelope(name, input, json!({"error": f.message, "exit_code": f.exit.code(), "detail": f.detail})),
        },
    }
}

type CmdResult = Result<(Exit, Value), Failure>;

fn cmd_rfd(doc: &Document) -> CmdResult {
    doc.require_valid_inclusions()?;
    let setup = doc.setup()?;
    let dec = rfd_decide(&setup)?;
    let mut body = serde_json::to_value(&dec).expect("decisions serialize");
    body["verified"] = json!(verify_decision(&setup, &dec));
    Ok((Exit::Ok, body))
}

/// The certificates need the inclusion squares only; expectation squares
/// are a tower concern.
fn require_commuting(setup: &fdca::AmalgamSetup) -> Result<(), Failure> {
    let report = validate_diagram(setup, None).map_err(|e| Failure::new(Exit::Invalid, e))?;
    if !report.ok {
        return Err(Failure::new(Exit::Validation, "diagram does not commute").with_detail(report));
    }
    Ok(())
}

fn value_summary(v: &CertVerdict, input: &fdca::cert::CertInput) -> Value {
    match &v.value {
        Some(x) if input.setup.d().is_scalars() => x.as_scalar().map(|z| scalar_json(&z)).unwrap_or(Value::Null),
        Some(x) => serde_json::to_value(x).expect("elements serialize"),
        None => Value::Null,
    }
}

fn cmd_cert(doc: &Document, variant: Variant) -> CmdResult {
    doc.require_valid_inclusions()?;
    let input = doc.cert_input()?;
    require_commuting(&input.setup)?;
    let verdict = match variant {
        Variant::Econd => econd_value(&input)?,
        Variant::Prop => check_prop_noninj(&input),
        Variant::Cor => check_cor_scalar_d(&input)?,
        Variant::Commutant => check_commutant_variant(&input)?,
    };
    let mut body = json!({"variant": verdict.variant, "value": value_summary(&verdict, &input), "verdict": verdict});
    if variant == Variant::Econd {
        let four: Option<Element> = econd_four_term(&input).ok();
        body["four_term_agrees"] = json!(four.as_ref() == verdict.value.as_ref());
    }
    Ok((Exit::Ok, body))
}

fn representation(doc: &Document, name: &str) -> Result<Representation, Failure> {
    Ok(Representation::from_inclusion(doc.inclusion(name)?)?)
}

fn cmd_tower(doc: &Document, depth: Option<usize>, tol: Option<f64>, mode: Option<TowerMode>) -> CmdResult {
    doc.require_valid_inclusions()?;
    let section = doc.tower.clone().unwrap_or_default();
    let depth = depth.or(section.depth).unwrap_or(DEFAULT_DEPTH);
    let tol = tol.or(section.tol).unwrap_or(DEFAULT_TOLERANCE);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::new(Exit::Invalid, format!("tolerance must be positive, got {tol}")));
    }
    let mode = match (mode, section.mode.as_deref()) {
        (Some(m), _) => m,
        (None, None) | (None, Some("equalD")) => TowerMode::EqualD,
        (None, Some("condexp")) => TowerMode::Condexp,
        (None, Some(other)) => return Err(Failure::new(Exit::Invalid, format!("unknown tower mode {other:?}"))),
    };
    let setup = doc.setup()?;
    let (pi_a, pi_b, source) = match (&section.pi_a, &section.pi_b) {
        (Some(a), Some(b)) => (representation(doc, a)?, representation(doc, b)?, "document"),
        (None, None) => {
            let dec = rfd_decide(&setup)?;
            let w = dec
                .witness
                .ok_or_else(|| Failure::new(Exit::Validation, "not residually finite dimensional: no witness to build on"))?;
            let cr = common_representation(&setup, &w)?;
            (cr.pi_a, cr.pi_b, "rfd witness")
        }
        _ => return Err(Failure::new(Exit::Invalid, "give both pi_a and pi_b, or neither")),
    };
    let (_, report) = match mode {
        TowerMode::EqualD => build_tower_equal_d(&setup, &pi_a, &pi_b, depth, tol)?,
        TowerMode::Condexp => {
            let exps = doc
                .diagram_expectations()?
                .ok_or_else(|| Failure::new(Exit::Invalid, "condexp mode needs diagram.expectations"))?;
            build_tower_condexp(&setup, &exps, &pi_a, &pi_b, depth, tol)?
        }
    };
    let exit = if report.pass { Exit::Ok } else { Exit::Residual };
    Ok((exit, json!({"representations": source, "report": report})))
}

fn cmd_validate(doc: &Document) -> CmdResult {
    let inclusions: Vec<Value> =
        doc.inclusion_reports().iter().map(|(n, r)| json!({"name": n, "ok": r.is_ok(), "report": r})).collect();
    let mut ok = inclusions.iter().all(|v| v["ok"] == json!(true));
    let mut body = json!({"inclusions": inclusions});
    if ok && doc.diagram.is_some() {
        let setup = doc.setup()?;
        if setup.upper.is_none() {
            // A lower row alone has no squares to check.
            body["diagram"] = json!({"upper_row": false, "ok": true});
            body["ok"] = json!(true);
            return Ok((Exit::Ok, body));
        }
        let exps = doc.diagram_expectations()?;
        let report = validate_diagram(&setup, exps.as_ref()).map_err(|e| Failure::new(Exit::Invalid, e))?;
        ok &= report.ok;
        body["diagram"] = serde_json::to_value(report).expect("reports serialize");
    }
    body["ok"] = json!(ok);
    Ok((if ok { Exit::Ok } else { Exit::Validation }, body))
}
