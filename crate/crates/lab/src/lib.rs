//! Scenario-driven verification runs over the exact ambient and tractor
//! machinery, with JSON and text reports.

pub mod builtin;
pub mod config;
pub mod exact;
pub mod report;
pub mod runner;
pub mod suite;

pub use builtin::{builtin_metric, scenario_metric};
pub use config::{load_scenario, CheckName, ScenarioConfig, ScenarioFile};
pub use report::{emit_report, Format, Report, Status, SuiteReport};
pub use runner::run_scenario;
pub use suite::{builtin_scenarios, run_suite};

use ambient_core::ambient::AmbientError;
use ambient_core::holonomy::HolonomyError;
use ambient_core::tensorgeo::GeoError;
use ambient_core::tractor::TractorError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("ambient solve: {0}")]
    Ambient(#[from] AmbientError),
    #[error("holonomy: {0}")]
    Holonomy(#[from] HolonomyError),
    #[error("tractor: {0}")]
    Tractor(#[from] TractorError),
    #[error("tensor calculus: {0}")]
    Geo(#[from] GeoError),
}
