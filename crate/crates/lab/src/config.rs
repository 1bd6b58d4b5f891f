//! Scenario files: parsing, defaults and validation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ambient_core::ambient::Corruption;
use ambient_core::jetcalc::{Jet, MultiIndex};
use ambient_core::tensorgeo::{Chart, TensorJet};
use serde::{Deserialize, Serialize};

use crate::exact::Q;
use crate::LabError;

/// Monomial exponents `"e1,e2,…"` mapped to coefficients.
pub type Polynomial = BTreeMap<String, Q>;

/// Components keyed `"i,j"` (zero-based, either order), each a polynomial.
pub type ComponentTable = BTreeMap<String, Polynomial>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinName {
    Flat,
    RoundSphere,
    EinsteinProductS2xs2,
    RandomRational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSource {
    Builtin {
        name: BuiltinName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        magnitude: Option<u32>,
    },
    Inline {
        components: ComponentTable,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Straightness,
    InitialConditions,
    Homogeneity,
    Ricci,
    FirstCoefficient,
    Obstruction,
    SpanEquality,
    TractorInAmbient,
    Skewness,
    DimensionBound,
    HistoryMonotone,
    CommutatorClosure,
    TSlot,
    ConnectionAgreement,
    ScaleHolonomy,
    DOperator,
    DExtension,
    GpIdentity,
    EinsteinTractor,
    Expectations,
}

impl CheckName {
    pub const ALL: [CheckName; 20] = [
        CheckName::Straightness,
        CheckName::InitialConditions,
        CheckName::Homogeneity,
        CheckName::Ricci,
        CheckName::FirstCoefficient,
        CheckName::Obstruction,
        CheckName::SpanEquality,
        CheckName::TractorInAmbient,
        CheckName::Skewness,
        CheckName::DimensionBound,
        CheckName::HistoryMonotone,
        CheckName::CommutatorClosure,
        CheckName::TSlot,
        CheckName::ConnectionAgreement,
        CheckName::ScaleHolonomy,
        CheckName::DOperator,
        CheckName::DExtension,
        CheckName::GpIdentity,
        CheckName::EinsteinTractor,
        CheckName::Expectations,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Straightness => "straightness",
            CheckName::InitialConditions => "initial_conditions",
            CheckName::Homogeneity => "homogeneity",
            CheckName::Ricci => "ricci",
            CheckName::FirstCoefficient => "first_coefficient",
            CheckName::Obstruction => "obstruction",
            CheckName::SpanEquality => "span_equality",
            CheckName::TractorInAmbient => "tractor_in_ambient",
            CheckName::Skewness => "skewness",
            CheckName::DimensionBound => "dimension_bound",
            CheckName::HistoryMonotone => "history_monotone",
            CheckName::CommutatorClosure => "commutator_closure",
            CheckName::TSlot => "t_slot",
            CheckName::ConnectionAgreement => "connection_agreement",
            CheckName::ScaleHolonomy => "scale_holonomy",
            CheckName::DOperator => "d_operator",
            CheckName::DExtension => "d_extension",
            CheckName::GpIdentity => "gp_identity",
            CheckName::EinsteinTractor => "einstein_tractor",
            CheckName::Expectations => "expectations",
        }
    }
}

/// Values a scenario promises; checked when present.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tractor_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilized: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_dim: Option<usize>,
}

impl Expectations {
    pub fn is_empty(&self) -> bool {
        *self == Expectations::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DOperatorSettings {
    pub samples: usize,
    pub weights: Vec<Q>,
    pub seed: u64,
}

impl Default for DOperatorSettings {
    fn default() -> Self {
        let w = ["0", "1", "-1", "1/2", "-3/2", "2", "-5/2"];
        DOperatorSettings { samples: 20, weights: w.iter().map(|s| Q(s.parse().unwrap())).collect(), seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeControl {
    Initial,
    Homogeneity,
    Straightness,
}

impl From<NegativeControl> for Corruption {
    fn from(c: NegativeControl) -> Corruption {
        match c {
            NegativeControl::Initial => Corruption::Initial,
            NegativeControl::Homogeneity => Corruption::Homogeneity,
            NegativeControl::Straightness => Corruption::Straightness,
        }
    }
}

/// A scenario file as written; unset orders are filled by [`ScenarioFile::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub n: usize,
    pub signature: (usize, usize),
    pub metric: MetricSource,
    #[serde(default)]
    pub x_jet_order: Option<u32>,
    #[serde(default)]
    pub rho_solve_order: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub even_ambiguity: Option<ComponentTable>,
    #[serde(default)]
    pub checks: Option<Vec<CheckName>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub expect: Option<Expectations>,
    #[serde(default)]
    pub d_operator: Option<DOperatorSettings>,
    #[doc(hidden)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_control: Option<NegativeControl>,
}

/// A validated scenario with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub n: usize,
    pub signature: (usize, usize),
    pub metric: MetricSource,
    pub x_jet_order: u32,
    pub rho_solve_order: usize,
    pub k_max: usize,
    pub even_ambiguity: Option<ComponentTable>,
    pub checks: Vec<CheckName>,
    pub output: Option<PathBuf>,
    pub expect: Expectations,
    pub d_operator: DOperatorSettings,
    #[doc(hidden)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_control: Option<NegativeControl>,
}

/// `K_max` used when a scenario leaves it unset.
pub fn default_k_max(n: usize) -> usize {
    if n == 3 {
        5
    } else {
        4
    }
}

/// Smallest `(x_jet_order, rho_solve_order)` giving the holonomy walk a
/// budget of `k_max` derivatives.
pub fn required_orders(n: usize, k_max: usize) -> (u32, usize) {
    if n % 2 == 1 {
        let m = k_max.max(1);
        (2 * m as u32 + 1, m)
    } else {
        ((k_max + n / 2) as u32, n / 2)
    }
}

/// Total degree to which the ambient metric is known.
pub fn ambient_budget(n: usize, x_order: u32, rho_order: usize) -> u32 {
    if n % 2 == 1 {
        let m = rho_order as u32;
        x_order.saturating_sub(m).min(m)
    } else {
        x_order.saturating_sub((n / 2) as u32)
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn resolve(self) -> Result<ScenarioConfig, LabError> {
        let invalid = |m: String| Err(LabError::Invalid(format!("{}: {m}", self.name)));
        let n = self.n;
        if n < 3 {
            return invalid(format!("n must be at least 3, got {n}"));
        }
        let (p, q) = self.signature;
        if p + q != n {
            return invalid(format!("signature ({p},{q}) does not add up to n = {n}"));
        }
        let k_max = self.k_max.unwrap_or_else(|| default_k_max(n));
        if k_max < 2 {
            return invalid(format!("k_max must be at least 2, got {k_max}"));
        }
        let (x_needed, rho_default) = required_orders(n, k_max);
        let rho = self.rho_solve_order.unwrap_or(rho_default);
        if n.is_multiple_of(2) && rho < n / 2 {
            return invalid(format!("even n = {n} needs rho_solve_order at least {}, got {rho}", n / 2));
        }
        if n % 2 == 1 && rho == 0 {
            return invalid("rho_solve_order must be positive".into());
        }
        let x_order = match self.x_jet_order {
            Some(x) => x,
            None if n % 2 == 1 => (2 * rho as u32 + 1).max(x_needed),
            None => x_needed,
        };
        if n % 2 == 1 && x_order < 2 * rho as u32 {
            return invalid(format!("x_jet_order {x_order} cannot carry rho_solve_order {rho}"));
        }
        let budget = ambient_budget(n, x_order, rho);
        if (budget as usize) < k_max {
            return invalid(format!(
                "k_max = {k_max} needs an ambient jet of total order {k_max}, but x_jet_order {x_order} with rho_solve_order {rho} gives {budget}"
            ));
        }
        if self.even_ambiguity.is_some() && n % 2 == 1 {
            return invalid("even_ambiguity only applies in even dimension".into());
        }
        if let MetricSource::Builtin { name, seed, magnitude } = &self.metric {
            match name {
                BuiltinName::EinsteinProductS2xs2 if n != 4 || q != 0 => {
                    return invalid("einstein_product_s2xs2 requires n = 4 and signature (4,0)".into())
                }
                BuiltinName::RoundSphere if q != 0 => return invalid("round_sphere is Riemannian".into()),
                BuiltinName::RandomRational => {}
                _ if seed.is_some() || magnitude.is_some() => {
                    return invalid("seed and magnitude only apply to random_rational".into())
                }
                _ => {}
            }
            if magnitude == &Some(0) {
                return invalid("magnitude must be positive".into());
            }
        }
        let mut checks = self.checks.unwrap_or_else(|| CheckName::ALL.to_vec());
        let before = checks.len();
        checks.sort();
        checks.dedup();
        if checks.len() != before {
            return invalid("a check is listed twice".into());
        }
        let d_operator = self.d_operator.unwrap_or_default();
        if d_operator.weights.is_empty() {
            return invalid("d_operator.weights is empty".into());
        }
        let cfg = ScenarioConfig {
            name: self.name,
            n,
            signature: self.signature,
            metric: self.metric,
            x_jet_order: x_order,
            rho_solve_order: rho,
            k_max,
            even_ambiguity: self.even_ambiguity,
            checks,
            output: self.output,
            expect: self.expect.unwrap_or_default(),
            d_operator,
            negative_control: self.negative_control,
        };
        // surfaces table errors and a degenerate base point before any solve
        let g = crate::builtin::scenario_metric(&cfg)?;
        let inertia = g.eval0_matrix().inertia();
        if inertia.zero > 0 {
            return Err(LabError::Invalid(format!("{}: metric is degenerate at the base point", cfg.name)));
        }
        if (inertia.positive, inertia.negative) != (p, q) {
            return Err(LabError::Invalid(format!(
                "{}: metric has signature ({},{}) at the base point, expected ({p},{q})",
                cfg.name, inertia.positive, inertia.negative
            )));
        }
        if let Some(t) = &cfg.even_ambiguity {
            table_tensor(t, g.chart(), x_order)?;
        }
        Ok(cfg)
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, LabError> {
    ScenarioFile::from_path(path)?.resolve()
}

fn parse_index(key: &str, n: usize, what: &str) -> Result<Vec<usize>, LabError> {
    let parts: Result<Vec<usize>, _> = key.split(',').map(|s| s.trim().parse::<usize>()).collect();
    match parts {
        Ok(v) if v.len() == 2 && v.iter().all(|&i| i < n) => Ok(v),
        _ => Err(LabError::Invalid(format!("{what} key {key:?} is not \"i,j\" with indices below {n}"))),
    }
}

fn parse_monomial(key: &str, n: usize) -> Result<MultiIndex, LabError> {
    let parts: Result<Vec<u32>, _> = key.split(',').map(|s| s.trim().parse::<u32>()).collect();
    match parts {
        Ok(v) if v.len() == n => Ok(MultiIndex::from_exponents(&v)),
        _ => Err(LabError::Invalid(format!("monomial key {key:?} needs {n} comma-separated exponents"))),
    }
}

/// A symmetric 2-tensor jet from a component table. Monomials above
/// `order` are dropped; a component given as both `"i,j"` and `"j,i"` must
/// agree.
pub fn table_tensor(table: &ComponentTable, chart: &Chart, order: u32) -> Result<TensorJet, LabError> {
    let n = chart.dim();
    let vars = chart.vars();
    let mut entries: BTreeMap<(usize, usize), Jet> = BTreeMap::new();
    for (key, poly) in table {
        let ij = parse_index(key, n, "component")?;
        let (i, j) = (ij[0].min(ij[1]), ij[0].max(ij[1]));
        let mut terms = Vec::with_capacity(poly.len());
        for (mono, c) in poly {
            terms.push((parse_monomial(mono, n)?, c.0.clone()));
        }
        let jet = Jet::from_terms(vars, order, terms.into_iter().filter(|(m, _)| m.total_degree() <= order));
        if let Some(prev) = entries.get(&(i, j)) {
            if prev != &jet {
                return Err(LabError::Invalid(format!("component ({i},{j}) is given twice with different values")));
            }
        }
        entries.insert((i, j), jet);
    }
    Ok(TensorJet::from_fn(chart, 0, 2, |idx| {
        let key = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        entries.get(&key).cloned().unwrap_or_else(|| Jet::zero(vars, order))
    }))
}

/// Inverse of [`table_tensor`] on the upper triangle; zero components and
/// coefficients are omitted.
pub fn tensor_table(t: &TensorJet) -> ComponentTable {
    let n = t.dim();
    let mut out = ComponentTable::new();
    for i in 0..n {
        for j in i..n {
            let jet = t.get(&[i, j]);
            if jet.is_zero() {
                continue;
            }
            let poly: Polynomial = jet
                .terms()
                .map(|(m, c)| {
                    let e: Vec<String> = m.exponents(n).iter().map(u32::to_string).collect();
                    (e.join(","), Q(c.clone()))
                })
                .collect();
            out.insert(format!("{i},{j}"), poly);
        }
    }
    out
}
