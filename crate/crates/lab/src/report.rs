//! Report records and their JSON and text forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::exact::Q;
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInfo {
    pub order: usize,
    /// `full` or `trace`.
    pub kind: String,
    pub x_order: u32,
    pub refinements: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualClass {
    Zero,
    TangentialTraceFree,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualInfo {
    pub rho_order: usize,
    pub critical: bool,
    pub class: ResidualClass,
    /// x-order through which the tangential part is determined.
    pub x_order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub x_jet_order: u32,
    pub rho_solve_order: usize,
    pub total_order: u32,
    pub steps: Vec<StepInfo>,
    pub residuals: Vec<ResidualInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanInfo {
    pub dim: usize,
    /// `[k, dim]` after each derivative order `k`.
    pub history: Vec<(usize, usize)>,
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolonomyInfo {
    pub k_max: usize,
    pub ambient: SpanInfo,
    pub tractor: SpanInfo,
    /// Span built from the scale-form tractor connection alone.
    pub scale: Option<SpanInfo>,
    /// `equal`, `tractor_in_ambient`, `ambient_in_tractor` or `incomparable`.
    pub comparison: String,
    /// An element of one span outside the other, row by row.
    pub witness: Option<Vec<Vec<Q>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionInfo {
    pub rho_order: usize,
    pub vanishes: bool,
    pub trace_free: bool,
    pub tangential: bool,
    /// `c` with obstruction `= c · Bach`, when both are nonzero.
    pub bach_constant: Option<Q>,
    /// Obstruction components at the base point, upper triangle.
    pub at_base: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelVector {
    pub vector: Vec<Q>,
    pub norm: Q,
    /// `positive`, `negative` or `null`.
    pub sign: String,
}

/// Wall-clock seconds per stage; the only nondeterministic part of a report.
pub type Timings = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: ScenarioConfig,
    pub solve: Option<SolveDiagnostics>,
    pub holonomy: Option<HolonomyInfo>,
    pub obstruction: Option<ObstructionInfo>,
    pub parallel_tractors: Vec<KernelVector>,
    pub checks: Vec<CheckResult>,
    /// Unrecoverable failure that cut the run short.
    pub error: Option<String>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Every check that ran passed and the run was not cut short.
    pub fn all_passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub reports: Vec<Report>,
    pub passed: bool,
    /// Per-scenario timings, kept apart from the deterministic records.
    pub timings: BTreeMap<String, Timings>,
}

impl SuiteReport {
    pub fn new(mut reports: Vec<Report>) -> Self {
        let timings = reports.iter_mut().filter_map(|r| Some((r.scenario.name.clone(), r.timings.take()?))).collect();
        let passed = reports.iter().all(|r| r.passed);
        SuiteReport { reports, passed, timings }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn span_line(out: &mut String, label: &str, s: &SpanInfo) {
    let hist: Vec<String> = s.history.iter().map(|(k, d)| format!("{k}:{d}")).collect();
    let _ = writeln!(
        out,
        "  {label:<8} dim {:>3}  history [{}]{}",
        s.dim,
        hist.join(" "),
        if s.stabilized { "  stabilized" } else { "" }
    );
}

pub fn to_text(r: &Report) -> String {
    let mut out = String::new();
    let c = &r.scenario;
    let _ = writeln!(out, "scenario {}  n={} signature ({},{})", c.name, c.n, c.signature.0, c.signature.1);
    let _ = writeln!(out, "  x_jet_order {}  rho_solve_order {}  k_max {}", c.x_jet_order, c.rho_solve_order, c.k_max);
    if let Some(s) = &r.solve {
        let _ = writeln!(out, "solve: total order {}", s.total_order);
        for res in &s.residuals {
            let _ = writeln!(
                out,
                "  Ric rho^{}: {:?}{}",
                res.rho_order,
                res.class,
                if res.critical { " (critical)" } else { "" }
            );
        }
    }
    if let Some(h) = &r.holonomy {
        let _ = writeln!(out, "holonomy (k_max {}):", h.k_max);
        span_line(&mut out, "ambient", &h.ambient);
        span_line(&mut out, "tractor", &h.tractor);
        if let Some(s) = &h.scale {
            span_line(&mut out, "scale", s);
        }
        let _ = writeln!(out, "span comparison: {}", h.comparison);
    }
    if let Some(o) = &r.obstruction {
        let c = o.bach_constant.as_ref().map(|q| format!(", = {q} x Bach")).unwrap_or_default();
        let _ = writeln!(out, "obstruction at rho^{}: {}{c}", o.rho_order, if o.vanishes { "zero" } else { "nonzero" });
    }
    for k in &r.parallel_tractors {
        let v: Vec<String> = k.vector.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "parallel tractor ({})  h-norm {} ({})", v.join(", "), k.norm, k.sign);
    }
    let _ = writeln!(out, "checks:");
    for ch in &r.checks {
        let tag = match ch.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let _ = writeln!(out, "  [{tag}] {:<22} {}", ch.name, ch.detail);
    }
    if let Some(e) = &r.error {
        let _ = writeln!(out, "error: {e}");
    }
    let _ = writeln!(out, "result: {}", if r.passed { "pass" } else { "FAIL" });
    if let Some(t) = &r.timings {
        let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k} {v:.2}s")).collect();
        let _ = writeln!(out, "timings: {}", parts.join(", "));
    }
    out
}

pub fn suite_text(s: &SuiteReport) -> String {
    let mut out = String::new();
    for r in &s.reports {
        out.push_str(&to_text(r));
        if let Some(t) = s.timings.get(&r.scenario.name) {
            let total: f64 = t.values().sum();
            let _ = writeln!(out, "time: {total:.2}s");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "suite: {}", if s.passed { "pass" } else { "FAIL" });
    out
}

pub fn emit_report(report: &Report, format: Format, out: Option<&Path>) -> Result<String, LabError> {
    let text = match format {
        Format::Json => to_json(report),
        Format::Text => to_text(report),
    };
    write_out(&text, out)?;
    Ok(text)
}

pub fn write_out(text: &str, out: Option<&Path>) -> Result<(), LabError> {
    if let Some(p) = out {
        std::fs::write(p, text).map_err(|e| LabError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}
