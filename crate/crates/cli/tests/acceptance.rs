//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fdca::cert::{econd_four_term, econd_form, econd_value, Conclusion};
use fdca::document::Document;
use fdca::rfd::{restrict_trace, trace_matching_system, verify_decision};
use fdca::{rfd_decide, sample, unitize, validate_diagram, Element};
use fdca_dilation::{build_tower_equal_d, common_representation};
use fdca_exact::{is_psd, rat, GaussRational, Rational};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOWER_TOL: f64 = 1e-8;
const FAST: Duration = Duration::from_millis(100);
const TOWER_BUDGET: Duration = Duration::from_secs(10);
const RFD_SAMPLES: usize = 100;
const CERT_SAMPLES: usize = 200;
const UNITIZATION_SAMPLES: usize = 500;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn load(name: &str) -> Document {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture readable");
    Document::from_json(&text).expect("fixture parses")
}

type Outcome = Result<String, String>;

fn check(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn c1_rfd_positive() -> Outcome {
    let doc = load("rfd_m2_m3.json");
    let t = Instant::now();
    let setup = doc.setup().map_err(|e| e.to_string())?;
    let dec = rfd_decide(&setup).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    check(dec.rfd, "verdict is not rfd")?;
    let w = dec.witness.as_ref().ok_or("no witness")?;
    check(w.tau_a.weights() == [rat(1, 2)], "s_A != 1/2")?;
    check(w.tau_b.weights() == [rat(1, 3)], "s_B != 1/3")?;
    check(w.k == 2 && w.l == 3, "k, l != 2, 3")?;
    let da = restrict_trace(&dec.lambda_a, &w.tau_a).map_err(|e| e.to_string())?;
    let db = restrict_trace(&dec.lambda_b, &w.tau_b).map_err(|e| e.to_string())?;
    check(da == db, "restricted traces differ")?;
    check(verify_decision(&setup, &dec), "decision does not re-verify")?;
    check(elapsed < FAST, &format!("took {elapsed:?}"))?;
    Ok(format!("s_A=1/2 s_B=1/3 k=2 l=3 in {elapsed:?}"))
}

fn c2_rfd_negative() -> Outcome {
    let doc = load("rfd_c2_infeasible.json");
    let t = Instant::now();
    let setup = doc.setup().map_err(|e| e.to_string())?;
    let dec = rfd_decide(&setup).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    check(!dec.rfd, "verdict is rfd")?;
    let cert = dec.stiemke().ok_or("no certificate")?;
    let m = trace_matching_system(&dec.lambda_a, &dec.lambda_b).map_err(|e| e.to_string())?;
    check(cert.verify(&m), "certificate rejected by its own check")?;
    // yᵀM ≥ 0 with a positive entry, recomputed here.
    let rows = m.to_rows();
    let image: Vec<Rational> = (0..m.cols())
        .map(|c| rows.iter().zip(&cert.y).fold(Rational::zero(), |acc, (r, y)| acc + y * &r[c].re))
        .collect();
    check(rows.iter().flatten().all(GaussRational::is_real), "system not real")?;
    check(image.iter().all(|v| !v.is_negative()), "yᵀM has a negative entry")?;
    check(image.iter().any(Signed::is_positive), "yᵀM is zero")?;
    check(elapsed < FAST, &format!("took {elapsed:?}"))?;
    let y: Vec<String> = cert.y.iter().map(ToString::to_string).collect();
    Ok(format!("y=[{}] in {elapsed:?}", y.join(",")))
}

/// Solve `M x = b` for square-or-tall `M`; `None` unless the solution exists
/// and is unique.
fn unique_solution(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<Rational>> = m.iter().zip(b).map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect()).collect();
    let mut row = 0;
    for col in 0..cols {
        let p = (row..a.len()).find(|&r| !a[r][col].is_zero())?;
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..=cols {
                    let t = &f * &a[row][c];
                    a[r][c] -= t;
                }
            }
        }
        row += 1;
    }
    if a[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some(a[..cols].iter().map(|r| r[cols].clone()).collect())
}

/// Vertex enumeration on `{x ≥ 0, Mx = 0, Σx = 1}`: a strictly positive
/// point exists iff the vertex supports cover every coordinate.
fn positive_null_oracle(m: &[Vec<Rational>]) -> bool {
    let n = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = m.to_vec();
    aug.push(vec![Rational::one(); n]);
    let mut b = vec![Rational::zero(); m.len()];
    b.push(Rational::one());
    let mut covered = vec![false; n];
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|c| mask & (1 << c) != 0).collect();
        let sub: Vec<Vec<Rational>> = aug.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        if let Some(x) = unique_solution(&sub, &b) {
            if x.iter().all(|v| !v.is_negative()) {
                for (&c, v) in cols.iter().zip(&x) {
                    covered[c] |= v.is_positive();
                }
            }
        }
    }
    covered.iter().all(|&c| c)
}

fn c3_rfd_random() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0003);
    let (mut yes, mut no) = (0, 0);
    for i in 0..RFD_SAMPLES {
        let setup = sample::lower_row(&mut rng, 3, 4);
        let dec = rfd_decide(&setup).map_err(|e| format!("sample {i}: {e}"))?;
        let m = trace_matching_system(&dec.lambda_a, &dec.lambda_b).map_err(|e| e.to_string())?;
        let real: Vec<Vec<Rational>> = m.to_rows().into_iter().map(|r| r.into_iter().map(|z| z.re).collect()).collect();
        let oracle = positive_null_oracle(&real);
        check(dec.rfd == oracle, &format!("sample {i}: decided {} but oracle says {oracle}", dec.rfd))?;
        check(verify_decision(&setup, &dec), &format!("sample {i}: decision does not re-verify"))?;
        if oracle {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!("{RFD_SAMPLES} diagrams agree ({yes} rfd, {no} not)"))
}

fn c4_certificate() -> Outcome {
    let doc = load("cert_econd.json");
    let t = Instant::now();
    let input = doc.cert_input().map_err(|e| e.to_string())?;
    let v = econd_value(&input).map_err(|e| e.to_string())?;
    let four = econd_four_term(&input).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let value = v.value.as_ref().and_then(Element::as_scalar).ok_or("value is not a scalar")?;
    check(value == GaussRational::from_int(1), &format!("value {value:?} != 1"))?;
    check(v.conclusion == Conclusion::NonInjective, "conclusion is not non-injective")?;
    check(Some(&four) == v.value.as_ref(), "four-term expansion differs")?;
    check(elapsed < FAST, &format!("took {elapsed:?}"))?;
    Ok(format!("value=1 non_injective, four-term agrees, in {elapsed:?}"))
}

fn c5_positivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
    let mut nonzero = 0;
    for i in 0..CERT_SAMPLES {
        let in_d = i % 2 == 1;
        let input = sample::cert_input(&mut rng, in_d);
        let v = econd_form(&input).map_err(|e| format!("sample {i}: {e}"))?;
        check(v.is_self_adjoint(), &format!("sample {i}: value not self-adjoint"))?;
        let psd = v.blocks().iter().all(|b| is_psd(b).expect("self-adjoint"));
        check(psd, &format!("sample {i}: value not PSD"))?;
        check(!in_d || v.is_zero(), &format!("sample {i}: nonzero with d̃ in D"))?;
        nonzero += usize::from(!v.is_zero());
    }
    Ok(format!("{CERT_SAMPLES} inputs PSD, zero on D ({nonzero} nonzero)"))
}

fn c6_tower() -> Outcome {
    let doc = load("tower_witness.json");
    let t = Instant::now();
    let setup = doc.setup().map_err(|e| e.to_string())?;
    let algebras = [setup.a(), setup.b(), setup.d()]
        .into_iter()
        .chain(setup.upper.iter().flat_map(|u| [u.lambda_a.target(), u.lambda_b.target()]));
    check(algebras.into_iter().all(|a| a.matrix_size() <= 4), "fixture exceeds M4")?;
    let w = rfd_decide(&setup).map_err(|e| e.to_string())?.witness.ok_or("no witness")?;
    let cr = common_representation(&setup, &w).map_err(|e| e.to_string())?;
    let (_, report) = build_tower_equal_d(&setup, &cr.pi_a, &cr.pi_b, 3, TOWER_TOL).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    for key in ["repextend", "d_agreement", "h_invariance_a", "h_invariance_b", "unitary_u", "star_hom"] {
        let r = report.residuals.get(key).ok_or(format!("missing residual {key}"))?;
        check(*r <= TOWER_TOL, &format!("{key} = {r:e}"))?;
    }
    check(report.pass, "report does not pass")?;
    check(elapsed < TOWER_BUDGET, &format!("took {elapsed:?}"))?;
    let worst = report.residuals.values().copied().fold(0.0, f64::max);
    Ok(format!("depth 3, dim {}, max residual {worst:.1e}, in {elapsed:?}", report.total_dim))
}

fn c7_refusal() -> Outcome {
    let doc = load("tower_noncommuting.json");
    let setup = doc.setup().map_err(|e| e.to_string())?;
    let exps = doc.diagram_expectations().map_err(|e| e.to_string())?;
    let rep = validate_diagram(&setup, exps.as_ref()).map_err(|e| e.to_string())?;
    check(rep.inclusion_squares.is_empty(), "inclusion squares fail too")?;
    check(rep.expectation_squares.as_ref().is_some_and(|s| !s.is_empty()), "expectation square commutes")?;
    let out = Command::new(env!("CARGO_BIN_EXE_fdca"))
        .args(["tower", "--mode", "condexp", "--input", &fixture("tower_noncommuting.json")])
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.code() == Some(3), &format!("exit {:?}", out.status.code()))?;
    Ok("exit 3".to_string())
}

fn c8_unitization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0008);
    for i in 0..UNITIZATION_SAMPLES {
        let base = sample::algebra(&mut rng, 3, 3);
        let u = unitize(&base);
        let draw = |rng: &mut ChaCha8Rng| u.pair(sample::element(rng, &base), sample::scalar(rng));
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let c = sample::scalar(&mut rng);
        let a = sample::element(&mut rng, &base);
        let one = u.unit();
        let eps = |z: &fdca::UnitizedElement| u.epsilon(z);
        let fail = |law: &str| format!("sample {i}: {law}");
        let xy = &x * &y;
        // Product written out componentwise.
        let a_part = &(&(&x.a * &y.a) + &y.a.scale(&x.mu)) + &x.a.scale(&y.mu);
        check(xy.a == a_part && xy.mu == &x.mu * &y.mu, &fail("product"))?;
        check(eps(&xy) == &eps(&x) * &eps(&y), &fail("ε multiplicative"))?;
        check(eps(&(&x + &y)) == &eps(&x) + &eps(&y), &fail("ε additive"))?;
        check(eps(&x.scale(&c)) == &c * &eps(&x), &fail("ε homogeneous"))?;
        check(eps(&x.adjoint()) == eps(&x).conj(), &fail("ε *-preserving"))?;
        check(eps(&one) == GaussRational::one(), &fail("ε(1) = 1"))?;
        check(eps(&u.embed(&a)).is_zero(), &fail("ε vanishes on A"))?;
        check(&one * &x == x && &x * &one == x, &fail("unit"))?;
        check(u.to_direct_sum(&one) == Element::unit(u.algebra()), &fail("unit maps to unit"))?;
        check(u.to_direct_sum(&xy) == &u.to_direct_sum(&x) * &u.to_direct_sum(&y), &fail("A ⊕ ℂ multiplicative"))?;
        check(u.from_direct_sum(&u.to_direct_sum(&x)) == x, &fail("round trip"))?;
        check(eps(&u.pair(Element::zero(&base), GaussRational::one())) == GaussRational::one(), &fail("ε(0, 1)"))?;
    }
    Ok(format!("{UNITIZATION_SAMPLES} samples, 0 failures"))
}

fn main() -> ExitCode {
    let criteria: [(u8, fn() -> Outcome); 8] = [
        (1, c1_rfd_positive),
        (2, c2_rfd_negative),
        (3, c3_rfd_random),
        (4, c4_certificate),
        (5, c5_positivity),
        (6, c6_tower),
        (7, c7_refusal),
        (8, c8_unitization),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {n}: PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL  {why}");
            }
        }
    }
    println!("acceptance: {}/8 passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
