use crate::config::{ScenarioConfig, ScenarioFile};
use crate::report::SuiteReport;
use crate::runner::run_scenario;
use crate::LabError;

/// Scenario files shipped with the crate, in run order.
const SHIPPED: &[(&str, &str)] = &[
    ("flat3", include_str!("../../../scenarios/flat3.json")),
    ("flat4", include_str!("../../../scenarios/flat4.json")),
    ("flat5", include_str!("../../../scenarios/flat5.json")),
    ("flat6", include_str!("../../../scenarios/flat6.json")),
    ("sphere3", include_str!("../../../scenarios/sphere3.json")),
    ("random3_s1", include_str!("../../../scenarios/random3_s1.json")),
    ("random3_s2", include_str!("../../../scenarios/random3_s2.json")),
    ("random3_s3", include_str!("../../../scenarios/random3_s3.json")),
    ("random4_s1", include_str!("../../../scenarios/random4_s1.json")),
    ("random4_s2", include_str!("../../../scenarios/random4_s2.json")),
    ("random4_s1_ambiguity", include_str!("../../../scenarios/random4_s1_ambiguity.json")),
    ("random6_s1", include_str!("../../../scenarios/random6_s1.json")),
    ("random6_s2", include_str!("../../../scenarios/random6_s2.json")),
    ("random6_s1_ambiguity", include_str!("../../../scenarios/random6_s1_ambiguity.json")),
    ("einstein4", include_str!("../../../scenarios/einstein4.json")),
];

pub fn builtin_scenarios() -> Result<Vec<ScenarioConfig>, LabError> {
    SHIPPED.iter().map(|(_, text)| ScenarioFile::parse(text)?.resolve()).collect()
}

pub fn run_suite() -> Result<SuiteReport, LabError> {
    Ok(SuiteReport::new(builtin_scenarios()?.iter().map(run_scenario).collect()))
}
