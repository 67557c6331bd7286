use fdca::{rfd_decide, sample, AmalgamSetup, Inclusion, UpperRow};
use fdca_dilation::rep::FloatMap;
use fdca_dilation::{build_tower_equal_d, common_representation, extend_representation, Representation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn upper(s: &AmalgamSetup, la: Inclusion, lb: Inclusion) -> AmalgamSetup {
    let u = UpperRow {
        phi_at: s.incl_a.then(&la).unwrap(),
        phi_bt: s.incl_b.then(&lb).unwrap(),
        lambda_d: Inclusion::identity(s.d()),
        lambda_a: la,
        lambda_b: lb,
    };
    s.clone().with_upper(u).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extensions_restrict_back(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let c = sample::algebra(&mut r, 2, 2);
        let into_h = sample::unital_extension(&mut r, &c, 1, 4);
        let incl = sample::unital_extension(&mut r, &c, 2, 3);
        let pi = Representation::from_inclusion(&into_h).unwrap();
        let ext = extend_representation(&pi, &incl).unwrap();
        prop_assert!(ext.repextend_residual(&pi, &incl).unwrap() < 1e-9);
        prop_assert!(ext.rep.star_hom_residual() < 1e-9);
    }

    #[test]
    fn witness_fed_towers_pass(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let low = sample::lower_row(&mut r, 2, 3);
        let la = sample::unital_extension(&mut r, low.a(), 2, 3);
        let lb = sample::unital_extension(&mut r, low.b(), 2, 3);
        let s = upper(&low, la, lb);
        if let Some(w) = rfd_decide(&s).unwrap().witness {
            let cr = common_representation(&s, &w).unwrap();
            let da = cr.pi_a.pullback(&FloatMap::new(&s.incl_a));
            let db = cr.pi_b.pullback(&FloatMap::new(&s.incl_b));
            prop_assert_eq!(da.images(), db.images());
            let (_, rep) = build_tower_equal_d(&s, &cr.pi_a, &cr.pi_b, 1, 1e-8).unwrap();
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }
}
