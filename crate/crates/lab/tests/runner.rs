use ambient_lab::report::{to_json, to_text};
use ambient_lab::{run_scenario, Report, ScenarioFile, Status};

fn run(body: &str) -> Report {
    run_scenario(&ScenarioFile::parse(body).unwrap().resolve().unwrap())
}

fn random3(extra: &str) -> String {
    format!(
        r#"{{"name":"r3","n":3,"signature":[3,0],"k_max":2,
            "metric":{{"kind":"builtin","name":"random_rational","seed":1}}{extra}}}"#
    )
}

fn failing(r: &Report) -> Vec<&str> {
    r.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect()
}

#[test]
fn small_flat_run_passes_every_check() {
    let r = run(r#"{"name":"f","n":3,"signature":[3,0],"k_max":2,"metric":{"kind":"builtin","name":"flat"},
        "expect":{"ambient_dim":0,"tractor_dim":0,"kernel_dim":5}}"#);
    assert!(r.passed, "{}", to_text(&r));
    let h = r.holonomy.as_ref().unwrap();
    assert_eq!((h.ambient.dim, h.tractor.dim), (0, 0));
    assert_eq!(h.comparison, "equal");
    assert_eq!(r.parallel_tractors.len(), 5);
    assert!(failing(&r).is_empty());
}

#[test]
fn checks_follow_the_requested_list() {
    let r = run(&random3(r#","checks":["ricci","straightness"]"#));
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["straightness", "ricci"]);
    assert!(r.passed);
}

#[test]
fn negative_controls_fail_their_checks() {
    let checks = r#","checks":["straightness","initial_conditions","homogeneity","ricci"]"#;
    let cases = [
        ("initial", vec!["initial_conditions"]),
        ("straightness", vec!["straightness"]),
        // a non-homogeneous metric also breaks the T = 2 grad(Q) identity
        ("homogeneity", vec!["straightness", "homogeneity"]),
    ];
    for (control, expected) in cases {
        let r = run(&random3(&format!(r#"{checks},"negative_control":"{control}""#)));
        assert!(!r.passed);
        assert_eq!(failing(&r), expected, "{control}: {}", to_text(&r));
    }
}

#[test]
fn expectation_mismatch_fails_only_that_check() {
    let r = run(&random3(r#","checks":["straightness","expectations"],"expect":{"ambient_dim":3}"#));
    assert_eq!(failing(&r), ["expectations"]);
}

#[test]
fn dimension_four_skips_the_curvature_identity() {
    let r = run(r#"{"name":"f4","n":4,"signature":[4,0],"k_max":2,"metric":{"kind":"builtin","name":"flat"},
        "checks":["gp_identity","obstruction"]}"#);
    let gp = r.check("gp_identity").unwrap();
    assert_eq!(gp.status, Status::Skipped);
    assert!(gp.detail.contains("n=4"));
    assert_eq!(r.check("obstruction").unwrap().status, Status::Pass);
    assert!(r.passed);
}

#[test]
fn shallow_generic_run_sees_the_tractor_span_lag() {
    let r = run(&random3(""));
    let h = r.holonomy.as_ref().unwrap();
    assert_eq!((h.ambient.dim, h.tractor.dim), (6, 3));
    assert!(!h.ambient.stabilized);
    assert_eq!(failing(&r), ["span_equality"]);
    assert_eq!(r.check("tractor_in_ambient").unwrap().status, Status::Pass);
    assert_eq!(r.check("gp_identity").unwrap().status, Status::Pass);
    assert_eq!(r.check("commutator_closure").unwrap().status, Status::Skipped);
}

#[test]
fn text_and_json_forms() {
    let mut r = run(&random3(""));
    let text = to_text(&r);
    assert!(text.contains("span comparison: tractor_in_ambient"));
    assert!(text.contains("[FAIL] span_equality"));
    assert!(text.contains("result: FAIL"));
    assert!(r.holonomy.as_ref().unwrap().witness.is_some());
    r.timings = None;
    let json = to_json(&r);
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(to_json(&back), json);
    assert!(!json.contains("timings"));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    // the partial span still fixes the null T direction
    assert_eq!(
        v["parallel_tractors"],
        serde_json::json!([{"vector": ["0", "1", "0", "0", "0"], "norm": "0", "sign": "null"}])
    );
    assert!(v["obstruction"].is_null());
}

#[test]
fn einstein_scale_yields_the_einstein_tractor() {
    let r = run(r#"{"name":"s","n":3,"signature":[3,0],"k_max":2,"metric":{"kind":"builtin","name":"round_sphere"},
        "checks":["einstein_tractor","ricci"]}"#);
    assert!(r.passed, "{}", to_text(&r));
    assert_eq!(r.check("einstein_tractor").unwrap().status, Status::Pass);
}

#[test]
fn runs_are_deterministic() {
    let strip = |mut r: Report| {
        r.timings = None;
        to_json(&r)
    };
    let a = strip(run(&random3("")));
    let b = strip(run(&random3("")));
    assert_eq!(a, b);
}
