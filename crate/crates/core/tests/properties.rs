use fdca::cert::{check_prop_noninj, econd_form, econd_four_term, Conclusion};
use fdca::rfd::{inclusion_matrix, restrict_trace, trace_matching_system, verify_decision};
use fdca::{minimal_central_projections, rfd_decide, sample, unitize, CondExp, Element, Inclusion, Trace};
use fdca_exact::{is_psd, GaussRational, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn element_psd(x: &Element) -> bool {
    x.is_self_adjoint() && x.blocks().iter().all(|b| is_psd(b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inclusions_are_star_homomorphisms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = sample::algebra(&mut r, 3, 2);
        let inc = sample::unital_extension(&mut r, &d, 3, 4);
        prop_assert!(inc.validate().is_ok());
        let x = sample::element(&mut r, &d);
        let y = sample::element(&mut r, &d);
        prop_assert_eq!(inc.apply(&(&x * &y)), &inc.apply(&x) * &inc.apply(&y));
        prop_assert_eq!(inc.apply(&x.adjoint()), inc.apply(&x).adjoint());
        prop_assert_eq!(inc.preimage(&inc.apply(&x)), Some(x));
    }

    #[test]
    fn central_projections_partition_the_unit(seed in any::<u64>()) {
        let a = sample::algebra(&mut rng(seed), 4, 4);
        let ps = minimal_central_projections(&a);
        let mut sum = Element::zero(&a);
        for (i, p) in ps.iter().enumerate() {
            prop_assert_eq!(p.adjoint(), p.clone());
            for (j, q) in ps.iter().enumerate() {
                let pq = p * q;
                prop_assert_eq!(pq, if i == j { p.clone() } else { Element::zero(&a) });
            }
            sum = &sum + p;
        }
        prop_assert_eq!(sum, Element::unit(&a));
    }

    #[test]
    fn canonical_inclusion_matrix_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = sample::algebra(&mut r, 3, 2);
        let inc = sample::unital_extension(&mut r, &d, 3, 4);
        let l = inclusion_matrix(&inc).unwrap();
        prop_assert!(l.is_consistent());
        let rebuilt = Inclusion::canonical(&l.entries, &d, inc.target()).unwrap();
        prop_assert_eq!(inclusion_matrix(&rebuilt).unwrap(), l);
    }

    #[test]
    fn conditional_expectation_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = sample::algebra(&mut r, 2, 2);
        let inc = sample::unital_extension(&mut r, &d, 2, 3);
        let a = inc.target().clone();
        let t = sample::faithful_trace(&mut r, &a);
        let e = CondExp::trace_preserving(&inc, &t).unwrap();
        let sub: Vec<Element> = d.units().map(|u| inc.apply(&Element::matrix_unit(&d, u))).collect();
        for u in a.units() {
            let x = Element::matrix_unit(&a, u);
            let ex = e.apply(&x);
            prop_assert_eq!(t.apply(&ex), t.apply(&x));
            prop_assert_eq!(e.apply(&ex), ex.clone());
            for p in &sub {
                for q in &sub {
                    prop_assert_eq!(e.apply(&(&(p * &x) * q)), &(p * &ex) * q);
                }
            }
        }
        let h = sample::element(&mut r, &a);
        let h = &h + &h.adjoint();
        prop_assert!(e.apply(&h).is_self_adjoint());
        let z = sample::element(&mut r, &a);
        prop_assert!(element_psd(&e.project(&(&z.adjoint() * &z))));
    }

    #[test]
    fn traces_are_tracial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::algebra(&mut r, 3, 3);
        let t = sample::faithful_trace(&mut r, &a);
        let x = sample::element(&mut r, &a);
        let y = sample::element(&mut r, &a);
        prop_assert_eq!(t.apply(&(&x * &y)), t.apply(&(&y * &x)));
    }

    #[test]
    fn rfd_symmetry_and_witness_validity(seed in any::<u64>()) {
        let s = sample::lower_row(&mut rng(seed), 3, 4);
        let d1 = rfd_decide(&s).unwrap();
        let d2 = rfd_decide(&s.swapped()).unwrap();
        prop_assert_eq!(d1.rfd, d2.rfd);
        prop_assert!(verify_decision(&s, &d1));
        prop_assert!(verify_decision(&s.swapped(), &d2));
        if let (Some(w1), Some(w2)) = (&d1.witness, &d2.witness) {
            prop_assert_eq!(&w1.tau_a, &w2.tau_b);
            prop_assert_eq!(&w1.tau_b, &w2.tau_a);
            prop_assert_eq!((w1.k, w1.l), (w2.l, w2.k));
        }
        if let (Some(c1), Some(c2)) = (&d1.certificate, &d2.certificate) {
            let neg: Vec<Rational> = c1.y.iter().map(|v| -v).collect();
            prop_assert_eq!(&neg, &c2.y);
        }
    }

    #[test]
    fn identical_inclusions_are_always_rfd(seed in any::<u64>()) {
        let s = sample::lower_row(&mut rng(seed), 3, 4);
        let same = fdca::AmalgamSetup::new(s.incl_a.clone(), s.incl_a.clone()).unwrap();
        let d = rfd_decide(&same).unwrap();
        prop_assert!(d.rfd);
        let w = d.witness.unwrap();
        prop_assert_eq!(w.tau_a, w.tau_b);
    }

    #[test]
    fn witness_is_scale_invariant(seed in any::<u64>(), num in 1i64..20, den in 1i64..20) {
        let s = sample::lower_row(&mut rng(seed), 3, 4);
        let d = rfd_decide(&s).unwrap();
        if let Some(w) = d.witness {
            let c = fdca_exact::rat(num, den);
            let m = trace_matching_system(&d.lambda_a, &d.lambda_b).unwrap();
            let scaled: Vec<GaussRational> = w.tau_a.weights().iter().chain(w.tau_b.weights())
                .map(|v| GaussRational::from_real(v * &c)).collect();
            prop_assert!(m.mul_vec(&scaled).iter().all(Zero::is_zero));
            let ta = Trace::new(w.tau_a.algebra(), w.tau_a.weights().iter().map(|v| v * &c).collect()).unwrap();
            prop_assert_eq!(ta.normalized().unwrap(), w.tau_a.clone());
            let la = inclusion_matrix(&s.incl_a).unwrap();
            let lb = inclusion_matrix(&s.incl_b).unwrap();
            prop_assert_eq!(restrict_trace(&la, &w.tau_a).unwrap(), restrict_trace(&lb, &w.tau_b).unwrap());
        }
    }

    #[test]
    fn econd_matches_four_term_expansion(seed in any::<u64>()) {
        let inp = sample::cert_input(&mut rng(seed), false);
        let v = econd_form(&inp).unwrap();
        prop_assert_eq!(&v, &econd_four_term(&inp).unwrap());
        prop_assert!(element_psd(&v));
    }

    #[test]
    fn econd_scales_quadratically(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut inp = sample::cert_input(&mut r, false);
        let v = econd_form(&inp).unwrap();
        let t = sample::scalar(&mut r);
        let t2 = GaussRational::from_real(t.norm_sqr());
        inp.a = inp.a.scale(&t);
        prop_assert_eq!(econd_form(&inp).unwrap(), v.scale(&t2));
        inp.a = sample::element(&mut r, inp.setup.a());
        let v = econd_form(&inp).unwrap();
        inp.b = inp.b.scale(&t);
        prop_assert_eq!(econd_form(&inp).unwrap(), v.scale(&t2));
    }

    #[test]
    fn econd_vanishes_on_d(seed in any::<u64>()) {
        let inp = sample::cert_input(&mut rng(seed), true);
        prop_assert!(econd_form(&inp).unwrap().is_zero());
    }

    #[test]
    fn prop_hypotheses_imply_nonzero_form(seed in any::<u64>()) {
        let inp = sample::cert_input(&mut rng(seed), false);
        let r = check_prop_noninj(&inp);
        if r.conclusion == Conclusion::NonInjective {
            prop_assert_eq!(r.nonzero, Some(true));
        }
    }

    #[test]
    fn unitization_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::algebra(&mut r, 3, 3);
        let u = unitize(&a);
        let x = u.pair(sample::element(&mut r, &a), sample::scalar(&mut r));
        let y = u.pair(sample::element(&mut r, &a), sample::scalar(&mut r));
        prop_assert_eq!(&u.unit() * &x, x.clone());
        prop_assert_eq!(&x * &u.unit(), x.clone());
        prop_assert_eq!(u.epsilon(&(&x * &y)), u.epsilon(&x) * u.epsilon(&y));
        prop_assert_eq!(u.epsilon(&x.adjoint()), u.epsilon(&x).conj());
        prop_assert!(u.epsilon(&u.embed(&x.a)).is_zero());
        prop_assert!(u.epsilon(&u.unit()).is_one());
        prop_assert_eq!(u.to_direct_sum(&(&x * &y)), &u.to_direct_sum(&x) * &u.to_direct_sum(&y));
    }
}
