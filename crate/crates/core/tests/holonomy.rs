use ambient_core::ambient::{build_ambient, AmbientMetricJet, Parity, RHO, T};
use ambient_core::holonomy::{
    ambient_frame, ambient_holonomy, commutator_closure_check, compare_spans, iterated_curvature, iterated_field,
    skewness_check, span_accumulate, t_slot_violations, tractor_holonomy, transverse_count_filter, Endomorphism,
    GeneratorStatus, HolonomyError, HolonomySpan, SpanRelation,
};
use ambient_core::jetcalc::Rational;
use ambient_core::linalg::Matrix;
use ambient_core::metrics;
use proptest::prelude::*;

fn generic3() -> AmbientMetricJet {
    build_ambient(&metrics::random_rational(3, 0, 8, 1), (3, 0), 4, None).unwrap()
}

fn endo(rows: Vec<Vec<i64>>, provenance: Vec<usize>) -> Endomorphism {
    let m = Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(Rational::from_integer).collect()).collect());
    Endomorphism { matrix: m, provenance }
}

#[test]
fn frame_is_homogeneous_with_one_transverse_vector() {
    let amb = generic3();
    let frame = ambient_frame(&amb).unwrap();
    assert_eq!(frame.len(), 5);
    assert_eq!(frame.transverse(), vec![RHO]);
    assert!(frame.is_homogeneous().unwrap());
    let h = amb.metric_at_z();
    assert_eq!(h[(T, RHO)], Rational::one());
}

#[test]
fn filter_counts_transverse_entries() {
    assert!(!transverse_count_filter(&[2, 0, 3], 4, Parity::Even));
    assert!(transverse_count_filter(&[2, 3, 4], 4, Parity::Even));
    assert!(transverse_count_filter(&[2, 3, 0], 6, Parity::Even));
    assert!(!transverse_count_filter(&[0, 3, 0], 6, Parity::Even));
    assert!(transverse_count_filter(&[0, 0, 0, 0, 0], 3, Parity::Odd));
}

#[test]
fn span_accumulation_is_exact() {
    let empty = span_accumulate(3, &[]);
    assert_eq!(empty.dim(), 0);
    let e = vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]];
    let twice = vec![vec![0, 2, 0], vec![-2, 0, 0], vec![0, 0, 0]];
    let f = vec![vec![0, 0, 1], vec![0, 0, 0], vec![-1, 0, 0]];
    let s =
        span_accumulate(3, &[endo(e.clone(), vec![1, 2]), endo(twice.clone(), vec![1, 2]), endo(twice, vec![2, 1])]);
    assert_eq!(s.dim(), 1);
    let s2 = span_accumulate(3, &[endo(e.clone(), vec![1, 2]), endo(f.clone(), vec![1, 2, 3])]);
    assert_eq!(s2.dim(), 2);
    assert_eq!(s2.history(), &[(2, 1), (3, 2)]);

    let c = compare_spans(&s, &s2);
    assert_eq!(c.relation, SpanRelation::AInB);
    assert!(!s.contains(c.witness.as_ref().unwrap()));
    assert_eq!(compare_spans(&s2, &s2).relation, SpanRelation::Equal);
    assert_eq!(compare_spans(&s2, &s).relation, SpanRelation::BInA);
}

#[test]
fn skewness_rejects_a_symmetric_generator() {
    let h = Matrix::identity(3);
    let s = span_accumulate(3, &[endo(vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]], vec![0, 1])]);
    assert!(!skewness_check(&s, &h));
    assert!(skewness_check(&HolonomySpan::new(3), &h));
}

#[test]
fn flat_and_conformally_flat_spans_vanish() {
    for g in [metrics::flat(3, 0, 8), metrics::sphere(3, 8)] {
        let amb = build_ambient(&g, (3, 0), 4, None).unwrap();
        let a = ambient_holonomy(&amb, 4).unwrap();
        let t = tractor_holonomy(&amb, 4).unwrap();
        assert_eq!((a.dim(), t.dim()), (0, 0));
        assert!(a.stabilized());
        assert_eq!(compare_spans(&t, &a).relation, SpanRelation::Equal);
    }
}

#[test]
fn t_direction_contributes_nothing() {
    let amb = generic3();
    let e = iterated_curvature(&amb, &[T, 2]).unwrap();
    assert!(e.matrix.is_zero());
    assert!(iterated_field(&amb, &[T, 3]).unwrap().at_base().is_zero());
    assert!(iterated_field(&amb, &[2, 3, T]).unwrap().at_base().is_zero());
    assert!(t_slot_violations(&amb, 3).unwrap().is_empty());
    let a = ambient_holonomy(&amb, 3).unwrap();
    assert!(a
        .generator_log()
        .iter()
        .filter(|r| r.index.contains(&T))
        .all(|r| r.status == GeneratorStatus::ShortCircuit));
}

#[test]
fn curvature_endomorphisms_are_skew() {
    let amb = generic3();
    let h = amb.metric_at_z();
    let e = iterated_curvature(&amb, &[2, 3]).unwrap().matrix;
    assert!(!e.is_zero());
    assert!((&(&e.transpose() * &h) + &(&h * &e)).is_zero());
}

#[test]
fn generic_three_dimensional_spans() {
    let amb = generic3();
    let a = ambient_holonomy(&amb, 4).unwrap();
    let t = tractor_holonomy(&amb, 4).unwrap();
    assert_eq!(a.dim(), 10);
    assert_eq!(t.dim(), 10);
    assert!(a.history_nondecreasing() && t.history_nondecreasing());
    assert_eq!(compare_spans(&t, &a).relation, SpanRelation::Equal);
    assert!(commutator_closure_check(&a));
    assert!(skewness_check(&a, &amb.metric_at_z()));
    // At low order the ambient side already sees transverse derivatives.
    let a3 = ambient_holonomy(&amb, 2).unwrap();
    let t3 = tractor_holonomy(&amb, 2).unwrap();
    assert_eq!(compare_spans(&t3, &a3).relation, SpanRelation::AInB);
}

#[test]
fn einstein_product_has_a_proper_subalgebra() {
    let amb = build_ambient(&metrics::einstein_product(6), (4, 0), 2, None).unwrap();
    let a = ambient_holonomy(&amb, 4).unwrap();
    let t = tractor_holonomy(&amb, 4).unwrap();
    assert_eq!(a.dim(), 10);
    assert!(a.stabilized());
    assert_eq!(compare_spans(&t, &a).relation, SpanRelation::Equal);
}

#[test]
fn even_dimension_never_differentiates_transversally_at_n4() {
    let amb = build_ambient(&metrics::random_rational(4, 0, 6, 2), (4, 0), 2, None).unwrap();
    let a = ambient_holonomy(&amb, 3).unwrap();
    assert!(a.generator_log().iter().all(|r| !r.index.contains(&RHO)));
    assert_eq!(iterated_curvature(&amb, &[0, 2]).unwrap_err(), HolonomyError::Filter(vec![0, 2]));
}

#[test]
fn budget_and_index_errors() {
    let amb = generic3();
    assert!(matches!(ambient_holonomy(&amb, 5), Err(HolonomyError::Budget { needed: 5, available: 4 })));
    assert!(matches!(iterated_curvature(&amb, &[2]), Err(HolonomyError::TooShort(_))));
    assert!(matches!(iterated_curvature(&amb, &[2, 9]), Err(HolonomyError::IndexRange { index: 9, dim: 5 })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn random_spans_are_skew_closed_and_nested(seed in 0u64..500) {
        let amb = build_ambient(&metrics::random_rational(2, 1, 6, seed), (2, 1), 3, None).unwrap();
        let a = ambient_holonomy(&amb, 3).unwrap();
        let t = tractor_holonomy(&amb, 3).unwrap();
        let h = amb.metric_at_z();
        prop_assert!(skewness_check(&a, &h));
        prop_assert!(a.dim() <= 10);
        prop_assert!(a.history_nondecreasing());
        let rel = compare_spans(&t, &a).relation;
        prop_assert!(rel == SpanRelation::Equal || rel == SpanRelation::AInB);
    }
}
