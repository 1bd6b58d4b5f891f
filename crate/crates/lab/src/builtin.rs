use ambient_core::metrics;
use ambient_core::tensorgeo::{Chart, TensorJet};

use crate::config::{table_tensor, BuiltinName, MetricSource, ScenarioConfig};
use crate::LabError;

/// A library metric at jet order `order`.
pub fn builtin_metric(
    name: BuiltinName,
    signature: (usize, usize),
    seed: Option<u64>,
    magnitude: Option<u32>,
    order: u32,
) -> Result<TensorJet, LabError> {
    let (p, q) = signature;
    let n = p + q;
    match name {
        BuiltinName::Flat => Ok(metrics::flat(p, q, order)),
        BuiltinName::RoundSphere if q == 0 => Ok(metrics::sphere(n, order)),
        BuiltinName::RoundSphere => Err(LabError::Invalid("round_sphere is Riemannian".into())),
        BuiltinName::EinsteinProductS2xs2 if (p, q) == (4, 0) => Ok(metrics::einstein_product(order)),
        BuiltinName::EinsteinProductS2xs2 => {
            Err(LabError::Invalid(format!("einstein_product_s2xs2 requires n = 4, got n = {n}")))
        }
        BuiltinName::RandomRational => {
            Ok(metrics::random_rational_bounded(p, q, order, seed.unwrap_or(1), magnitude.unwrap_or(3)))
        }
    }
}

pub fn scenario_metric(cfg: &ScenarioConfig) -> Result<TensorJet, LabError> {
    match &cfg.metric {
        MetricSource::Builtin { name, seed, magnitude } => {
            builtin_metric(*name, cfg.signature, *seed, *magnitude, cfg.x_jet_order)
        }
        MetricSource::Inline { components } => table_tensor(components, &Chart::standard(cfg.n), cfg.x_jet_order),
    }
}

pub fn scenario_ambiguity(cfg: &ScenarioConfig) -> Result<Option<TensorJet>, LabError> {
    cfg.even_ambiguity.as_ref().map(|t| table_tensor(t, &Chart::standard(cfg.n), cfg.x_jet_order)).transpose()
}
