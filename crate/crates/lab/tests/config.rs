use ambient_core::jetcalc::Rational;
use ambient_core::metrics;
use ambient_lab::config::{table_tensor, tensor_table, BuiltinName, CheckName, MetricSource};
use ambient_lab::exact::Q;
use ambient_lab::{builtin_metric, load_scenario, LabError, ScenarioFile};
use proptest::prelude::*;

fn file(body: &str) -> Result<ambient_lab::ScenarioConfig, LabError> {
    ScenarioFile::parse(body)?.resolve()
}

fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

#[test]
fn flat_file_gets_defaults() {
    let cfg = load_scenario(&scenario_path("flat3")).unwrap();
    assert_eq!(cfg.n, 3);
    assert_eq!(cfg.k_max, 5);
    assert_eq!(cfg.rho_solve_order, 5);
    assert_eq!(cfg.x_jet_order, 11);
    assert_eq!(cfg.checks, CheckName::ALL.to_vec());
    assert_eq!(cfg.d_operator.samples, 20);
    assert!(cfg.even_ambiguity.is_none());
}

#[test]
fn even_defaults_follow_the_critical_order() {
    let cfg = file(r#"{"name":"e","n":6,"signature":[6,0],"metric":{"kind":"builtin","name":"flat"}}"#).unwrap();
    assert_eq!((cfg.x_jet_order, cfg.rho_solve_order, cfg.k_max), (7, 3, 4));
    let cfg =
        file(r#"{"name":"e","n":4,"signature":[4,0],"k_max":3,"metric":{"kind":"builtin","name":"flat"}}"#).unwrap();
    assert_eq!((cfg.x_jet_order, cfg.rho_solve_order), (5, 2));
}

#[test]
fn invariant_violations_are_named() {
    let cases = [
        (r#"{"name":"a","n":3,"signature":[2,0],"metric":{"kind":"builtin","name":"flat"}}"#, "does not add up"),
        (r#"{"name":"a","n":2,"signature":[2,0],"metric":{"kind":"builtin","name":"flat"}}"#, "at least 3"),
        (
            r#"{"name":"a","n":4,"signature":[4,0],"rho_solve_order":1,"metric":{"kind":"builtin","name":"flat"}}"#,
            "rho_solve_order at least 2",
        ),
        (
            r#"{"name":"a","n":3,"signature":[3,0],"x_jet_order":7,"rho_solve_order":3,"k_max":5,"metric":{"kind":"builtin","name":"flat"}}"#,
            "needs an ambient jet",
        ),
        (
            r#"{"name":"a","n":3,"signature":[3,0],"metric":{"kind":"builtin","name":"einstein_product_s2xs2"}}"#,
            "requires n = 4",
        ),
        (
            r#"{"name":"a","n":3,"signature":[3,0],"metric":{"kind":"builtin","name":"flat"},"even_ambiguity":{}}"#,
            "even dimension",
        ),
        (
            r#"{"name":"a","n":3,"signature":[3,0],"metric":{"kind":"builtin","name":"flat","seed":2}}"#,
            "only apply to random_rational",
        ),
        (
            r#"{"name":"a","n":3,"signature":[3,0],"checks":["ricci","ricci"],"metric":{"kind":"builtin","name":"flat"}}"#,
            "listed twice",
        ),
        (r#"{"name":"a","n":3,"signature":[2,1],"metric":{"kind":"builtin","name":"flat"}}"#, ""),
    ];
    for (body, needle) in cases {
        match file(body) {
            Err(LabError::Invalid(m)) => assert!(m.contains(needle), "{m}"),
            Ok(_) if needle.is_empty() => {}
            other => panic!("{body}: {other:?}"),
        }
    }
}

#[test]
fn parse_errors_are_reported() {
    assert!(matches!(file("{"), Err(LabError::Parse(_))));
    assert!(matches!(
        file(r#"{"name":"a","n":3,"signature":[3,0],"metric":{"kind":"builtin","name":"flat"},"bogus":1}"#),
        Err(LabError::Parse(_))
    ));
    assert!(matches!(
        file(r#"{"name":"a","n":3,"signature":[3,0],"metric":{"kind":"inline","components":{"0,0":{"0,0,0":1.5}}}}"#),
        Err(LabError::Parse(_))
    ));
    assert!(matches!(load_scenario(std::path::Path::new("/nonexistent/x.json")), Err(LabError::Io(_))));
}

#[test]
fn inline_metric_must_be_nondegenerate_with_the_stated_signature() {
    let degenerate = r#"{"name":"d","n":3,"signature":[3,0],"metric":{"kind":"inline","components":{
        "0,0":{"0,0,0":"1"},"1,1":{"0,0,0":"1"},"2,2":{"1,0,0":"1"}}}}"#;
    match file(degenerate) {
        Err(LabError::Invalid(m)) => assert!(m.contains("degenerate"), "{m}"),
        other => panic!("{other:?}"),
    }
    let lorentz = r#"{"name":"l","n":3,"signature":[3,0],"metric":{"kind":"inline","components":{
        "0,0":{"0,0,0":"1"},"1,1":{"0,0,0":"1"},"2,2":{"0,0,0":"-1"}}}}"#;
    match file(lorentz) {
        Err(LabError::Invalid(m)) => assert!(m.contains("signature (2,1)"), "{m}"),
        other => panic!("{other:?}"),
    }
    let bad_key =
        r#"{"name":"k","n":3,"signature":[3,0],"metric":{"kind":"inline","components":{"0,3":{"0,0,0":"1"}}}}"#;
    assert!(matches!(file(bad_key), Err(LabError::Invalid(_))));
    let clash = r#"{"name":"c","n":3,"signature":[3,0],"metric":{"kind":"inline","components":{
        "0,0":{"0,0,0":"1"},"1,1":{"0,0,0":"1"},"2,2":{"0,0,0":"1"},"0,1":{"1,0,0":"1"},"1,0":{"1,0,0":"2"}}}}"#;
    assert!(matches!(file(clash), Err(LabError::Invalid(_))));
}

#[test]
fn inline_table_reproduces_a_builtin() {
    let g = metrics::random_rational(3, 0, 6, 4);
    let t = tensor_table(&g);
    assert_eq!(table_tensor(&t, g.chart(), 6).unwrap(), g);
    let body = serde_json::json!({
        "name": "inline", "n": 3, "signature": [3, 0], "x_jet_order": 6, "rho_solve_order": 2, "k_max": 2,
        "metric": {"kind": "inline", "components": t}
    });
    let cfg = file(&body.to_string()).unwrap();
    assert_eq!(ambient_lab::scenario_metric(&cfg).unwrap(), g);
}

#[test]
fn builtins_are_deterministic() {
    let a = builtin_metric(BuiltinName::RandomRational, (3, 0), Some(1), Some(3), 6).unwrap();
    let b = builtin_metric(BuiltinName::RandomRational, (3, 0), Some(1), Some(3), 6).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, metrics::random_rational(3, 0, 6, 1));
    let c = builtin_metric(BuiltinName::RandomRational, (3, 0), Some(2), Some(3), 6).unwrap();
    assert_ne!(a, c);
    let flat = builtin_metric(BuiltinName::Flat, (2, 1), None, None, 4).unwrap();
    assert_eq!(flat.eval0_matrix(), metrics::signature_matrix(2, 1));
    assert!(builtin_metric(BuiltinName::EinsteinProductS2xs2, (3, 0), None, None, 4).is_err());
    assert!(builtin_metric(BuiltinName::RoundSphere, (2, 1), None, None, 4).is_err());
}

#[test]
fn rationals_serialize_as_strings() {
    let q = Q(Rational::new(3, 2));
    assert_eq!(serde_json::to_string(&q).unwrap(), "\"3/2\"");
    assert_eq!(serde_json::from_str::<Q>("\"-6/4\"").unwrap(), Q(Rational::new(-3, 2)));
    assert!(serde_json::from_str::<Q>("1.5").is_err());
    assert!(serde_json::from_str::<Q>("\"1/0\"").is_err());
    let src = MetricSource::Builtin { name: BuiltinName::RandomRational, seed: Some(3), magnitude: None };
    let json = serde_json::to_string(&src).unwrap();
    assert_eq!(json, r#"{"kind":"builtin","name":"random_rational","seed":3}"#);
}

proptest! {
    #[test]
    fn rational_strings_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Q(Rational::new(p, q));
        let s = serde_json::to_string(&r).unwrap();
        prop_assert!(!s.contains('.'));
        prop_assert_eq!(serde_json::from_str::<Q>(&s).unwrap(), r);
    }

    #[test]
    fn component_tables_round_trip(seed in 0u64..500, order in 2u32..6) {
        let g = metrics::random_rational(3, 0, order, seed);
        let t = tensor_table(&g);
        prop_assert_eq!(table_tensor(&t, g.chart(), order).unwrap(), g);
    }
}
