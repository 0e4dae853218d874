use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use semiconf::series::Var;
use semiconf::solver::{residual, solve, AnsatzMap, BoundaryData, Exponent, Point3};
use semiconf::{BiSeries, CScalar, Mode};

fn rat() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=7).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn scalar() -> impl Strategy<Value = CScalar> {
    (rat(), rat()).prop_map(|(a, b)| CScalar::exact(a, b))
}

fn nonzero() -> impl Strategy<Value = CScalar> {
    scalar().prop_filter("nonzero", |c| !c.is_zero())
}

fn series(trunc: usize) -> impl Strategy<Value = BiSeries> {
    prop::collection::vec((0..=trunc, 0..=trunc, scalar()), 0..8)
        .prop_map(move |terms| BiSeries::from_terms(trunc, Mode::Exact, terms).unwrap())
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![Just(Exponent::Q0), Just(Exponent::Q1)]
}

fn boundary() -> impl Strategy<Value = BoundaryData> {
    (exponent(), nonzero(), nonzero(), prop::collection::vec(scalar(), 0..3)).prop_map(|(q, a, b, rest)| {
        let mut data = vec![a, b];
        data.extend(rest);
        BoundaryData::new(q, data).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(f in series(5), g in series(5), h in series(5)) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
        prop_assert!(f.sub(&f).unwrap().is_zero());
        let one = BiSeries::constant(CScalar::one(Mode::Exact), 5);
        prop_assert_eq!(f.mul(&one).unwrap(), f.clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_rule(f in series(6), g in series(6)) {
        for var in [Var::U, Var::Z] {
            let lhs = f.mul(&g).unwrap().diff(var);
            let rhs = f.diff(var).mul(&g).unwrap().add(&f.mul(&g.diff(var)).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs.truncate(5));
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(f in series(3), g in series(3), u in scalar(), z in scalar()) {
        // both factors have degree <= 3, so the product is exact at trunc 6
        let (f, g) = (f.truncate(6), g.truncate(6));
        let f = BiSeries::from_terms(6, Mode::Exact, f.iter().map(|(k, l, c)| (k, l, c.clone()))).unwrap();
        let g = BiSeries::from_terms(6, Mode::Exact, g.iter().map(|(k, l, c)| (k, l, c.clone()))).unwrap();
        let prod = f.mul(&g).unwrap().eval(&u, &z).unwrap();
        let sep = &f.eval(&u, &z).unwrap() * &g.eval(&u, &z).unwrap();
        prop_assert_eq!(prod, sep);
        let sum = f.add(&g).unwrap().eval(&u, &z).unwrap();
        prop_assert_eq!(sum, &f.eval(&u, &z).unwrap() + &g.eval(&u, &z).unwrap());
    }

    #[test]
    fn solved_series_has_zero_residual(bd in boundary()) {
        let psi = solve(&bd, 6).unwrap();
        prop_assert!(residual(&psi, bd.q()).unwrap().is_zero());
        for l in 0..=6 {
            let expect = bd.value(l);
            prop_assert_eq!(psi.derivative_at_origin(0, l), expect);
        }
    }

    #[test]
    fn scale_equivariance(bd in boundary(), lambda in nonzero()) {
        let psi = solve(&bd, 6).unwrap();
        let scaled = solve(&bd.scaled(&lambda).unwrap(), 6).unwrap();
        prop_assert_eq!(scaled, psi.scale(&lambda).unwrap());
    }

    #[test]
    fn solution_is_unique_and_data_sensitive(bd in boundary(), idx in 0usize..4, delta in nonzero()) {
        let a = solve(&bd, 6).unwrap();
        prop_assert_eq!(&a, &solve(&bd, 6).unwrap());
        let mut data: Vec<CScalar> = (0..4).map(|l| bd.value(l)).collect();
        data[idx] = &data[idx] + &delta;
        prop_assume!(!data[0].is_zero() && !data[1].is_zero());
        let b = solve(&BoundaryData::new(bd.q(), data).unwrap(), 6).unwrap();
        let differs = (1..=6).any(|k| (0..=6 - k).any(|l| a.get(k, l) != b.get(k, l)));
        prop_assert!(differs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_differences_converge_quadratically(
        x in 0.1f64..0.3, y in 0.1f64..0.3, z in -0.2f64..0.2,
    ) {
        let c = CScalar::float(1.0, 0.0);
        let bd = BoundaryData::new(Exponent::Q0, vec![CScalar::float(1.0, 0.0), c]).unwrap();
        let m = AnsatzMap::new(Exponent::Q0, solve(&bd, 12).unwrap()).with_fd_step(1e-2);
        let s = m.semiconformality_residual(&Point3::new(x, y, z)).unwrap();
        let ratio = s.gap / s.gap_half_step;
        prop_assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
}
