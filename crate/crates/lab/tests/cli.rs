use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambientlab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const FLAT: &str = r#"{"name":"flat","n":3,"signature":[3,0],"k_max":2,"metric":{"kind":"builtin","name":"flat"}}"#;

#[test]
fn passing_run_exits_zero_and_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "flat.json", FLAT);
    let out = dir.path().join("report.json");
    let o = lab(&["run", &scenario, "--out", out.to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["scenario"]["k_max"], 2);
}

#[test]
fn text_format_and_kmax_override() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "flat.json", FLAT);
    let o = lab(&["run", &scenario, "--format", "text", "--kmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("k_max 3"));
    assert!(text.contains("span comparison: equal"));
    assert!(text.contains("result: pass"));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "bad.json",
        r#"{"name":"bad","n":3,"signature":[3,0],"k_max":2,"metric":{"kind":"builtin","name":"flat"},
            "checks":["expectations"],"expect":{"ambient_dim":1}}"#,
    );
    let o = lab(&["run", &scenario]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"][0]["status"], "fail");
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"name":"x","n":3,"signature":[1,1],"metric":{"kind":"builtin","name":"flat"}}"#,
    );
    let o = lab(&["run", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not add up"));
    let missing = dir.path().join("missing.json");
    assert_eq!(lab(&["run", missing.to_str().unwrap()]).status.code(), Some(2));
    let scenario = write(dir.path(), "flat.json", FLAT);
    assert_eq!(lab(&["run", &scenario, "--kmax", "1"]).status.code(), Some(2));
    assert_ne!(lab(&["run", &scenario, "--mode", "float"]).status.code(), Some(0));
}

#[test]
fn shipped_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ambient_lab::load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert_eq!(count, ambient_lab::builtin_scenarios().unwrap().len());
}
