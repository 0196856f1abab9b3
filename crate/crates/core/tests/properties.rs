use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weylconn_core::connection::{deck_equivariance_residual, nabla_h_residual, weyl_connection};
use weylconn_core::expr::random::RandomExpr;
use weylconn_core::fields::DeckMap;
use weylconn_core::scenarios::{build_rw_torus, RwParams};
use weylconn_core::transport::{classify_exactness, Verdict};
use weylconn_core::{MetricField, OneFormField, Scope, Signature};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let scope = Scope::new(["x", "y"], ["c"]).unwrap();
        let binds = scope.bind([("c", 0.4)]).unwrap();
        let e = RandomExpr::new(&scope, 4).generate(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = e.to_string();
        let back = scope.parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        let (a, b) = (e.eval(&[x, y], &binds).unwrap(), back.eval(&[x, y], &binds).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} -> {} vs {}", text, a, b);
    }

    #[test]
    fn eval_equals_jet_value(seed in any::<u64>(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let scope = Scope::new(["x", "y"], Vec::<String>::new()).unwrap();
        let binds = scope.bind(Vec::<(&str, f64)>::new()).unwrap();
        let e = RandomExpr::new(&scope, 5).generate(&mut ChaCha8Rng::seed_from_u64(seed));
        let v = e.eval(&[x, y], &binds).unwrap();
        prop_assert_eq!(e.eval_jet1(&[x, y], &binds).unwrap().value, v);
        prop_assert_eq!(e.eval_jet2(&[x, y], &binds).unwrap().value, v);
    }

    #[test]
    fn random_weyl_pairs_satisfy_defining_equation(seed in any::<u64>()) {
        let scope = Scope::new(["x", "y", "z"], Vec::<String>::new()).unwrap();
        let binds = scope.bind(Vec::<(&str, f64)>::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = RandomExpr::new(&scope, 3);
        let diag = (0..3)
            .map(|_| scope.parse("1").unwrap().add(&gen.generate(&mut rng).powi(2)))
            .collect();
        let h = MetricField::diagonal(&scope, diag, Signature::riemannian(3)).unwrap();
        let f = gen.generate(&mut rng);
        let psi = OneFormField::differential(&f)
            .plus(&OneFormField::parse(&scope, &["0.3", "-1.2", "0.5"]).unwrap())
            .unwrap();
        let conn = weyl_connection(&h, &psi, &[], &binds).unwrap();
        for pt in weylconn_core::SampleBox::cube(3, 1.0).sample(5, seed) {
            let r = nabla_h_residual(&conn, &h, Some(&psi), &pt, &binds).unwrap();
            prop_assert!(r < 1e-9, "residual {}", r);
        }
    }

    #[test]
    fn torus_connection_is_translation_invariant(dx in -2.0f64..2.0, dy in -2.0f64..2.0, dz in -2.0f64..2.0) {
        let sc = build_rw_torus(&RwParams::default()).unwrap();
        let deck = DeckMap::translation(&[0.0, dx, dy, dz]);
        let r = deck_equivariance_residual(&sc.connection, &deck, &[0.2, 0.1, 0.5, 0.3], &sc.bindings).unwrap();
        prop_assert!(r < 1e-10);
    }

    #[test]
    fn verdict_tolerance(p in proptest::collection::vec(-1e-9f64..1e-9, 1..5)) {
        prop_assert_eq!(classify_exactness(&p, 1e-8), Verdict::GloballyMetric);
    }
}
