use ambient_core::jetcalc::{Jet, JetError, MultiIndex, Rational, Vars};
use proptest::prelude::*;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn poly(vars: Vars, order: u32, terms: &[(&[u32], &str)]) -> Jet {
    Jet::from_terms(vars, order, terms.iter().map(|(e, c)| (MultiIndex::from_exponents(e), q(c))))
}

#[test]
fn constants() {
    let one = Jet::constant(q("1"), Vars::uniform(2), 3);
    assert_eq!(one.num_terms(), 1);
    assert_eq!(one.eval0(), q("1"));
    assert!(Jet::constant(q("0"), Vars::uniform(3), 5).is_zero());
    let c = Jet::constant(q("-7/2"), Vars::uniform(1), 2);
    assert_eq!(c.to_poly_string(&["x"]), "-7/2");
}

#[test]
fn products_truncate() {
    let v = Vars::uniform(1);
    let a = poly(v, 2, &[(&[0], "1"), (&[1], "1")]);
    let b = poly(v, 2, &[(&[0], "1"), (&[1], "-1")]);
    assert_eq!(&a * &b, poly(v, 2, &[(&[0], "1"), (&[2], "-1")]));
    assert!((&a * &Jet::zero(v, 2)).is_zero());

    let c = poly(v, 2, &[(&[0], "1"), (&[1], "1"), (&[2], "1")]);
    let got = &c * &a;
    assert_eq!(got.to_poly_string(&["x"]), "1 + 2*x + 2*x^2");
}

#[test]
fn mixed_orders_take_minimum() {
    let v = Vars::uniform(1);
    let a = poly(v, 4, &[(&[0], "1"), (&[3], "1")]);
    let b = poly(v, 2, &[(&[1], "1")]);
    let s = &a + &b;
    assert_eq!(s.order(), 2);
    assert_eq!(s.to_poly_string(&["x"]), "1 + x");
}

#[test]
fn inverses() {
    let v = Vars::uniform(1);
    let a = poly(v, 2, &[(&[0], "1"), (&[1], "1")]);
    assert_eq!(a.invert().unwrap().to_poly_string(&["x"]), "1 - x + x^2");
    let two = Jet::constant(q("2"), v, 4);
    assert_eq!(two.invert().unwrap(), Jet::constant(q("1/2"), v, 4));

    let v2 = Vars::uniform(2);
    let b = poly(v2, 2, &[(&[0, 0], "1"), (&[1, 0], "1"), (&[0, 1], "1")]);
    let inv = b.invert().unwrap();
    let expected = poly(
        v2,
        2,
        &[(&[0, 0], "1"), (&[1, 0], "-1"), (&[0, 1], "-1"), (&[2, 0], "1"), (&[1, 1], "2"), (&[0, 2], "1")],
    );
    assert_eq!(inv, expected);
    assert_eq!(&b * &inv, Jet::one(v2, 2));

    assert_eq!(poly(v, 3, &[(&[1], "1")]).invert(), Err(JetError::ZeroConstantTerm));
}

#[test]
fn partials() {
    let v = Vars::uniform(2);
    let a = poly(v, 4, &[(&[2, 1], "1")]);
    let d = a.partial(0).unwrap();
    assert_eq!(d, poly(v, 3, &[(&[1, 1], "2")]));
    assert!(Jet::constant(q("5"), v, 2).partial(1).unwrap().is_zero());
    let b = poly(v, 3, &[(&[1, 0], "1"), (&[0, 2], "3")]);
    assert_eq!(b.partial(1).unwrap(), poly(v, 2, &[(&[0, 1], "6")]));
    assert_eq!(b.partial(2), Err(JetError::VarOutOfRange { var: 2, nvars: 2 }));
    let z = Jet::constant(q("5"), v, 0).partial(0).unwrap();
    assert_eq!(z.order(), 0);
}

#[test]
fn eval_at_base_point() {
    let v = Vars::uniform(1);
    assert_eq!(poly(v, 2, &[(&[0], "3"), (&[1], "1")]).eval0(), q("3"));
    assert_eq!(Jet::zero(v, 2).eval0(), q("0"));
    let a = poly(v, 2, &[(&[0], "1"), (&[1], "1")]);
    let b = poly(v, 2, &[(&[0], "1"), (&[1], "-1")]);
    assert_eq!((&a * &b).eval0(), q("1"));
}

#[test]
fn variable_mismatch_is_an_error() {
    let a = Jet::one(Vars::uniform(2), 2);
    let b = Jet::one(Vars::uniform(3), 2);
    assert!(matches!(a.try_add(&b), Err(JetError::VarMismatch { .. })));
    assert!(matches!(a.try_mul(&b), Err(JetError::VarMismatch { .. })));
}

#[test]
fn weighted_grading() {
    // x has weight 1, r has weight 2: the order counts x-degree + 2 * r-degree.
    let v = Vars::weighted(&[1, 2]);
    let r = Jet::var(1, v, 4);
    let x = Jet::var(0, v, 4);
    let r2 = &r * &r;
    assert_eq!(r2.num_terms(), 1);
    assert!((&r2 * &x).is_zero());
    assert_eq!(r.partial(1).unwrap().order(), 2);
    let shifted = x.mul_monomial(MultiIndex::from_exponents(&[0, 1]), &q("1/2"));
    assert_eq!(shifted.order(), 6);
    assert_eq!(shifted.coeff(MultiIndex::from_exponents(&[1, 1])), q("1/2"));
}

#[test]
fn reindex_moves_and_evaluates() {
    let src = Vars::uniform(2);
    let a = poly(src, 3, &[(&[0, 0], "1"), (&[1, 0], "2"), (&[0, 1], "5"), (&[1, 2], "7")]);
    // drop var 1 (evaluate at 0), put var 0 into slot 2 of a 3-variable set
    let dst = Vars::uniform(3);
    let b = a.reindex(dst, &[Some(2), None], 3);
    assert_eq!(b, poly(dst, 3, &[(&[0, 0, 0], "1"), (&[0, 0, 1], "2")]));
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rational::new(n, d))
}

fn arb_jet(nvars: usize, order: u32) -> impl Strategy<Value = Jet> {
    let v = Vars::uniform(nvars);
    prop::collection::vec((prop::collection::vec(0u32..=order, nvars), arb_rational()), 0..10).prop_map(move |terms| {
        Jet::from_terms(v, order, terms.into_iter().map(|(e, c)| (MultiIndex::from_exponents(&e), c)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in arb_jet(2, 4), b in arb_jet(2, 4), c in arb_jet(2, 4)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
    }

    #[test]
    fn inverse_multiplies_to_one(a in arb_jet(3, 3), c in arb_rational()) {
        prop_assume!(!c.is_zero());
        let a = &a.with_order(3) + &Jet::constant(&c - &a.eval0(), a.vars(), 3);
        let inv = a.invert().unwrap();
        prop_assert_eq!(&a * &inv, Jet::one(a.vars(), 3));
    }

    #[test]
    fn partials_commute(a in arb_jet(3, 5)) {
        let ab = a.partial(0).unwrap().partial(2).unwrap();
        let ba = a.partial(2).unwrap().partial(0).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn truncation_consistency(a in arb_jet(2, 5), b in arb_jet(2, 5), m in 0u32..5) {
        let high = (&a * &b).truncate(m);
        let low = &a.truncate(m) * &b.truncate(m);
        prop_assert_eq!(high, low);
    }
}
