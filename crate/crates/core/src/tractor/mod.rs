//! The standard tractor bundle, realized from the ambient metric along `G`
//! and, independently, from a choice of scale.
//!
//! Fibre slots are ordered like the ambient frame: `0` is the `∂_ρ`
//! direction, `1` is `T` (the tractor `X`), `2 + i` is `∂_{x^i}`. A standard
//! tractor `u` corresponds to the degree `−1` ambient field
//! `u^0 t^{-1} ∂_ρ + u^1 ∂_t + u^i t^{-1} ∂_i`; weight `w` multiplies by `t^w`.

mod connection;
mod dop;
mod identities;

pub use connection::{
    ambient_connection_matrices, ambient_curvature_along_g, scale_connection_matrices, scale_curvature,
    tractor_connection_ambient, tractor_connection_ambient_field, tractor_connection_scale, tractor_holonomy_scale,
};
pub use dop::{homogeneous_extension, tractor_d_ambient, tractor_d_scale};
pub use identities::{
    einstein_tractor, gp_curvature_identity_check, parallel_tractor_detect, GpReport, ParallelTractor,
};

use thiserror::Error;

use crate::ambient::{embed_x, restrict_to_x, AmbientError, AmbientMetricJet, RHO, T};
use crate::holonomy::HolonomyError;
use crate::jetcalc::{Jet, JetError, MultiIndex, Rational, Vars};
use crate::linalg::{Inertia, Matrix};
use crate::tensorgeo::{lie_bracket, Chart, GeoError, TensorJet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TractorError {
    #[error("the curvature identity divides by n − 4 and does not apply in dimension 4")]
    DimensionFour,
    #[error("expected {expected} components, got {got}")]
    Components { expected: usize, got: usize },
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

impl From<JetError> for TractorError {
    fn from(e: JetError) -> Self {
        TractorError::Geo(e.into())
    }
}

/// A section of the weight-`w` standard tractor bundle in the scale of the
/// input metric: `n + 2` x-chart jets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TractorJet {
    pub weight: Rational,
    pub comps: Vec<Jet>,
}

impl TractorJet {
    pub fn new(weight: Rational, comps: Vec<Jet>) -> Self {
        TractorJet { weight, comps }
    }

    pub fn order(&self) -> u32 {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn truncate(&self, order: u32) -> Self {
        TractorJet {
            weight: self.weight.clone(),
            comps: self.comps.iter().map(|c| c.truncate(order).with_order(order)).collect(),
        }
    }

    /// The homogeneous ambient vector field, constant in `ρ`.
    pub fn extend(&self, chart: &Chart, order: u32) -> Vec<Jet> {
        let vars = chart.vars();
        let n = self.comps.len() - 2;
        let tw = t_power(vars, &self.weight, order);
        let tw1 = t_power(vars, &(&self.weight - &Rational::one()), order);
        self.comps
            .iter()
            .enumerate()
            .map(|(a, c)| {
                let c = embed_x(c, n, vars).truncate(order).with_order(order);
                if a == T {
                    &tw * &c
                } else {
                    &tw1 * &c
                }
            })
            .collect()
    }

    /// Components of an ambient field at `ρ = 0, t = 1`.
    pub fn restrict(field: &[Jet], weight: Rational, x_chart: &Chart) -> Self {
        TractorJet { weight, comps: field.iter().map(|c| restrict_to_x(c, x_chart)).collect() }
    }
}

/// `t^w = (1 + s)^w` as a jet in the ambient chart.
pub(crate) fn t_power(vars: Vars, w: &Rational, order: u32) -> Jet {
    let wt = vars.weight(T).max(1);
    let terms = (0..=order / wt).map(|k| {
        let mut e = vec![0; vars.nvars()];
        e[T] = k;
        (MultiIndex::from_exponents(&e), Rational::binomial(w, k))
    });
    Jet::from_terms(vars, order, terms)
}

/// `L_T U = (w − 1) U`: the field is homogeneous of degree `w − 1`.
pub fn is_homogeneous_field(field: &[Jet], weight: &Rational, chart: &Chart) -> Result<bool, GeoError> {
    let vars = chart.vars();
    let order = field.iter().map(Jet::order).min().unwrap_or(0);
    let euler = crate::ambient::euler_field(chart.dim() - 2, vars, order);
    let t = TensorJet::from_fn(chart, 1, 0, |i| euler[i[0]].clone());
    let u = TensorJet::from_fn(chart, 1, 0, |i| field[i[0]].clone());
    let bracket = lie_bracket(&t, &u)?;
    let expected = u.scale(&(weight - &Rational::one()));
    let o = bracket.order().min(expected.order());
    Ok(bracket.truncate(o) == expected.truncate(o))
}

/// Realization of the fibre over the base point at `z`.
#[derive(Clone, Debug)]
pub struct TractorFiber {
    pub dim: usize,
    /// Slot of the distinguished section `X ↔ T`.
    pub t_index: usize,
    /// `h = g̃(z)` in the frame basis.
    pub metric: Matrix,
}

impl TractorFiber {
    /// Basis of `span{T}^⊥`.
    pub fn t_perp(&self) -> Vec<Vec<Rational>> {
        let row = Matrix::from_rows(vec![self.metric.row(self.t_index).to_vec()]);
        row.nullspace()
    }

    /// Frame slots whose vectors are tangent to `G` at `z`.
    pub fn tangent_to_g(&self) -> Vec<usize> {
        (0..self.dim).filter(|&a| a != RHO).collect()
    }
}

pub fn tractor_fiber(amb: &AmbientMetricJet) -> TractorFiber {
    TractorFiber { dim: amb.n() + 2, t_index: T, metric: amb.metric_at_z() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TractorMetricAtZ {
    pub h: Matrix,
    pub signature: (usize, usize),
}

impl TractorMetricAtZ {
    /// `T` is null and orthogonal to the tangential slots, giving
    /// `span{T} ⊂ span{T}^⊥`.
    pub fn filtration_holds(&self) -> bool {
        let dim = self.h.rows();
        self.h[(T, T)].is_zero() && (2..dim).all(|i| self.h[(T, i)].is_zero())
    }
}

pub fn tractor_metric(amb: &AmbientMetricJet) -> TractorMetricAtZ {
    let h = amb.metric_at_z();
    let Inertia { positive, negative, .. } = h.inertia();
    TractorMetricAtZ { h, signature: (positive, negative) }
}

/// The coordinate lift `η^i ∂_{x^i}` of an x-chart vector field.
pub fn invariant_lift(eta: &[Jet], chart: &Chart, order: u32) -> Vec<Jet> {
    let vars = chart.vars();
    let n = eta.len();
    let mut out = vec![Jet::zero(vars, order); n + 2];
    for (i, e) in eta.iter().enumerate() {
        out[2 + i] = embed_x(e, n, vars).truncate(order).with_order(order);
    }
    out
}

/// Splitting covectors at `z` in the frame basis: `X_A = g̃(T, ·)`,
/// `Y_A = g̃(∂_ρ, ·)` and `Z_A{}^i = g^{ij} g̃(∂_j, ·)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingSections {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub z: Vec<Vec<Rational>>,
}

impl SplittingSections {
    /// Coefficients `(φ, ψ_i, ρ)` of `V_A = φ X_A + ψ_i Z_A^i + ρ Y_A`;
    /// `None` if the three families are not a basis.
    pub fn decompose(&self, v: &[Rational]) -> Option<(Rational, Vec<Rational>, Rational)> {
        let mut rows = vec![self.x.clone()];
        rows.extend(self.z.iter().cloned());
        rows.push(self.y.clone());
        let m = Matrix::from_rows(rows).transpose();
        let c = m.solve(v)?;
        let k = c.len();
        Some((c[0].clone(), c[1..k - 1].to_vec(), c[k - 1].clone()))
    }

    pub fn is_basis(&self) -> bool {
        let mut rows = vec![self.x.clone()];
        rows.extend(self.z.iter().cloned());
        rows.push(self.y.clone());
        let k = rows.len();
        Matrix::from_rows(rows).rank() == k
    }
}

pub fn splitting_sections(amb: &AmbientMetricJet) -> SplittingSections {
    let h = amb.metric_at_z();
    let dim = h.rows();
    let n = dim - 2;
    let g0 = Matrix::from_fn(n, n, |i, j| h[(2 + i, 2 + j)].clone());
    let ginv = g0.inverse().expect("nondegenerate base metric");
    let lower = |v: &[Rational]| h.mul_vec(v);
    let unit = |a: usize| (0..dim).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect::<Vec<_>>();
    let x = lower(&unit(T));
    let y = lower(&unit(RHO));
    let z = (0..n)
        .map(|i| {
            let mut acc = vec![Rational::zero(); dim];
            for j in 0..n {
                let row = lower(&unit(2 + j));
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a += &(&ginv[(i, j)] * r);
                }
            }
            acc
        })
        .collect();
    SplittingSections { x, y, z }
}
