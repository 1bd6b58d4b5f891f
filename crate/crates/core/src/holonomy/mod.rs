//! Infinitesimal holonomy at the base point `z`: exact spans of iterated
//! derivatives of curvature, evaluated in a fixed homogeneous frame.
//!
//! Derivatives are nested: `E(A_1..A_k) = D_{A_k} E(A_1..A_{k−1})` with
//! `D_A E = ∂_A E + [Γ_A, E]` and `E(A_1, A_2) = R(ζ_{A_1}, ζ_{A_2})`.
//! Over a coordinate frame this differs from the fully covariant form only
//! by terms of lower derivative order, so both give the same span at each
//! order.

mod span;

pub use span::{
    commutator_closure_check, compare_spans, skewness_check, span_accumulate, GeneratorRecord, GeneratorStatus,
    HolonomySpan, SpanComparison, SpanRelation,
};

use thiserror::Error;

use crate::ambient::{euler_field, AmbientError, AmbientMetricJet, Parity, RHO, T};
use crate::jetcalc::{Jet, MultiIndex};
use crate::linalg::Matrix;
use crate::tensorgeo::{dot, lie_bracket, GeoError, TensorJet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HolonomyError {
    #[error("derivative order {needed} exceeds the jet budget {available}")]
    Budget { needed: usize, available: usize },
    #[error("multi-index {0:?} has more transverse entries than allowed")]
    Filter(Vec<usize>),
    #[error("multi-index {0:?} is too short: curvature needs two entries")]
    TooShort(Vec<usize>),
    #[error("frame index {index} out of range for dimension {dim}")]
    IndexRange { index: usize, dim: usize },
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

/// Square matrix of jets; an endomorphism field in a fixed frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoField {
    dim: usize,
    entries: Vec<Jet>,
}

impl EndoField {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        EndoField { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, p: usize, q: usize) -> &Jet {
        &self.entries[p * self.dim + q]
    }

    pub fn order(&self) -> u32 {
        self.entries.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Jet::is_zero)
    }

    /// Value at the origin of the chart.
    pub fn at_base(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |p, q| self.get(p, q).eval0())
    }

    pub fn map(&self, f: impl FnMut(&Jet) -> Jet) -> Self {
        EndoField { dim: self.dim, entries: self.entries.iter().map(f).collect() }
    }

    fn product(&self, other: &EndoField) -> EndoField {
        let n = self.dim;
        let vars = self.entries[0].vars();
        let order = self.order().min(other.order());
        EndoField::from_fn(n, |p, q| dot(vars, order, (0..n).map(|r| (self.get(p, r), other.get(r, q)))))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &EndoField) -> EndoField {
        let a = self.product(other);
        let b = other.product(self);
        EndoField { dim: self.dim, entries: a.entries.iter().zip(&b.entries).map(|(x, y)| x - y).collect() }
    }

    /// `∂_var E + [A, E]`.
    pub fn covariant_partial(&self, var: usize, conn: &EndoField) -> Result<EndoField, GeoError> {
        let d: Vec<Jet> = self.entries.iter().map(|e| e.partial(var)).collect::<Result<_, _>>()?;
        let c = conn.commutator(self);
        Ok(EndoField { dim: self.dim, entries: d.iter().zip(&c.entries).map(|(x, y)| x + y).collect() })
    }

    /// Value at the origin of [`Self::covariant_partial`], from the linear
    /// part of `E` and the constant parts of `A` and `E` alone.
    pub fn covariant_partial_at_base(&self, var: usize, conn: &EndoField) -> Matrix {
        let unit = MultiIndex::unit(var);
        let d = Matrix::from_fn(self.dim, self.dim, |p, q| self.get(p, q).coeff(unit));
        let c = conn.at_base().commutator(&self.at_base());
        Matrix::from_fn(self.dim, self.dim, |p, q| &d[(p, q)] + &c[(p, q)])
    }

    /// `V^a ∂_a E + [V^a A_a, E]` for a vector field `V`.
    pub fn derivative_along(&self, v: &[Jet], conns: &[EndoField]) -> Result<EndoField, GeoError> {
        let vars = self.entries[0].vars();
        let order = self.order().saturating_sub(1);
        let mut d = EndoField::from_fn(self.dim, |_, _| Jet::zero(vars, order));
        for (a, va) in v.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            let term = self.covariant_partial(a, &conns[a])?;
            d.entries = d.entries.iter().zip(&term.entries).map(|(x, y)| x + &(va * y)).collect();
        }
        Ok(d)
    }
}

/// The homogeneous frame `ζ_0 = ∂_ρ`, `ζ_1 = T`, `ζ_{1+i} = ∂_{x^i}`.
#[derive(Clone, Debug)]
pub struct AmbientFrame {
    pub vectors: Vec<TensorJet>,
}

impl AmbientFrame {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `L_T ζ_A = 0` for every frame vector.
    pub fn is_homogeneous(&self) -> Result<bool, GeoError> {
        let t = &self.vectors[T];
        for v in &self.vectors {
            if !lie_bracket(t, v)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Indices of frame vectors not tangent to `G = {ρ = 0}`.
    pub fn transverse(&self) -> Vec<usize> {
        self.vectors
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.get(&[RHO]).filter_terms(|m| m.exponent(RHO) == 0).is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn ambient_frame(amb: &AmbientMetricJet) -> Result<AmbientFrame, HolonomyError> {
    let geo = amb.geometry()?;
    let chart = geo.metric.chart();
    let vars = chart.vars();
    let order = geo.metric.order();
    let n = amb.n() + 2;
    let euler = euler_field(amb.n(), vars, order);
    let vectors = (0..n)
        .map(|a| {
            TensorJet::from_fn(chart, 1, 0, |i| match a {
                T => euler[i[0]].clone(),
                _ if i[0] == a => Jet::one(vars, order),
                _ => Jet::zero(vars, order),
            })
        })
        .collect();
    Ok(AmbientFrame { vectors })
}

/// At most `n/2 − 2` entries equal to the transverse index `0` in even
/// dimension; no constraint in odd dimension.
pub fn transverse_count_filter(index: &[usize], n: usize, parity: Parity) -> bool {
    match parity {
        Parity::Odd => true,
        Parity::Even => {
            let zeros = index.iter().filter(|&&a| a == RHO).count();
            zeros + 2 <= n / 2
        }
    }
}

/// A value of an iterated curvature derivative at `z`, with the multi-index
/// that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    pub matrix: Matrix,
    pub provenance: Vec<usize>,
}

/// Connection matrices `(Γ_A)^P_Q = Γ̃^P_{AQ}` in the coordinate frame.
fn connection_fields(amb: &AmbientMetricJet) -> Result<Vec<EndoField>, HolonomyError> {
    let gamma = &amb.geometry()?.christoffel;
    let n = amb.n() + 2;
    Ok((0..n).map(|a| EndoField::from_fn(n, |p, q| gamma.get(&[p, a, q]).clone())).collect())
}

/// `R̃(∂_a, ∂_b)` as an endomorphism field.
fn curvature_field(amb: &AmbientMetricJet, a: usize, b: usize) -> Result<EndoField, HolonomyError> {
    let r = &amb.geometry()?.riemann;
    let n = amb.n() + 2;
    Ok(EndoField::from_fn(n, |p, q| r.get(&[p, q, a, b]).clone()))
}

fn check_index(amb: &AmbientMetricJet, index: &[usize]) -> Result<(), HolonomyError> {
    let dim = amb.n() + 2;
    if index.len() < 2 {
        return Err(HolonomyError::TooShort(index.to_vec()));
    }
    if let Some(&a) = index.iter().find(|&&a| a >= dim) {
        return Err(HolonomyError::IndexRange { index: a, dim });
    }
    let available = amb.total_order() as usize;
    if index.len() > available {
        return Err(HolonomyError::Budget { needed: index.len(), available });
    }
    Ok(())
}

/// The nested field for a multi-index, with `ζ_1 = T` applied honestly
/// (no short-circuit). Used to verify the `T`-slot identities.
pub fn iterated_field(amb: &AmbientMetricJet, index: &[usize]) -> Result<EndoField, HolonomyError> {
    check_index(amb, index)?;
    let geo = amb.geometry()?;
    let vars = geo.metric.chart().vars();
    let order = geo.metric.order();
    let conns = connection_fields(amb)?;
    let euler = euler_field(amb.n(), vars, order);
    let (a, b) = (index[0], index[1]);
    // R̃(T, ζ) = t R̃(∂_t, ζ)
    let mut e = curvature_field(amb, a, b)?;
    if a == T || b == T {
        e = e.map(|x| &euler[T] * x);
    }
    for &c in &index[2..] {
        e = if c == T { e.derivative_along(&euler, &conns)? } else { e.covariant_partial(c, &conns[c])? };
    }
    Ok(e)
}

/// `(∇̃^{k−2} R̃)(ζ_{A_1}, …, ζ_{A_k})` at `z`, in nested form. Entries equal
/// to `1` (the direction `T`) give zero by `T ⨼ R̃ = 0` and `∇̃_T E = 0` for
/// dilation-invariant `E`; see [`iterated_field`] for the honest computation.
pub fn iterated_curvature(amb: &AmbientMetricJet, index: &[usize]) -> Result<Endomorphism, HolonomyError> {
    check_index(amb, index)?;
    if !transverse_count_filter(index, amb.n(), amb.parity()) {
        return Err(HolonomyError::Filter(index.to_vec()));
    }
    let dim = amb.n() + 2;
    let matrix = if index.contains(&T) { Matrix::zeros(dim, dim) } else { iterated_field(amb, index)?.at_base() };
    Ok(Endomorphism { matrix, provenance: index.to_vec() })
}

/// Frame directions used by the two spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Directions {
    /// All frame vectors, subject to the transverse filter.
    Ambient,
    /// Tangential lifts `∂_{x^i}` only.
    Tangential,
}

fn accumulate(amb: &AmbientMetricJet, k_max: usize, dirs: Directions) -> Result<HolonomySpan, HolonomyError> {
    let available = amb.total_order() as usize;
    if k_max > available {
        return Err(HolonomyError::Budget { needed: k_max, available });
    }
    let n = amb.n();
    let dim = n + 2;
    let parity = amb.parity();
    let frame: Vec<usize> = match dirs {
        Directions::Ambient => (0..dim).collect(),
        Directions::Tangential => (2..dim).collect(),
    };
    let mut span = HolonomySpan::new(dim);
    if k_max < 2 {
        return Ok(span);
    }
    let conns = connection_fields(amb)?;
    let mut level: Vec<(Vec<usize>, EndoField)> = Vec::new();
    for (i, &a) in frame.iter().enumerate() {
        for &b in &frame[i + 1..] {
            let idx = vec![a, b];
            if !transverse_count_filter(&idx, n, parity) {
                continue;
            }
            if a == T || b == T {
                span.record_short_circuit(idx);
                continue;
            }
            let e = curvature_field(amb, a, b)?;
            span.offer(idx.clone(), &e.at_base());
            level.push((idx, e));
        }
    }
    span.close_order(2);
    for k in 3..=k_max {
        let mut next = Vec::with_capacity(level.len() * frame.len());
        for (idx, e) in &level {
            for &c in &frame {
                let mut child = idx.clone();
                child.push(c);
                if !transverse_count_filter(&child, n, parity) {
                    continue;
                }
                if c == T {
                    span.record_short_circuit(child);
                    continue;
                }
                if k < k_max {
                    let d = e.covariant_partial(c, &conns[c])?;
                    span.offer(child.clone(), &d.at_base());
                    next.push((child, d));
                } else {
                    span.offer(child, &e.covariant_partial_at_base(c, &conns[c]));
                }
            }
        }
        span.close_order(k);
        level = next;
    }
    span.finish();
    Ok(span)
}

/// Span over all admissible multi-indices of length `2..=k_max`.
pub fn ambient_holonomy(amb: &AmbientMetricJet, k_max: usize) -> Result<HolonomySpan, HolonomyError> {
    accumulate(amb, k_max, Directions::Ambient)
}

/// Span over multi-indices in the tangential lift directions only.
pub fn tractor_holonomy(amb: &AmbientMetricJet, k_max: usize) -> Result<HolonomySpan, HolonomyError> {
    accumulate(amb, k_max, Directions::Tangential)
}

/// Largest derivative order the solved jets support.
pub fn jet_budget(amb: &AmbientMetricJet) -> usize {
    amb.total_order() as usize
}

/// Evaluates every multi-index of length `2..=k_max` that contains the
/// direction `T` without short-circuiting; returns those that are nonzero.
pub fn t_slot_violations(amb: &AmbientMetricJet, k_max: usize) -> Result<Vec<Vec<usize>>, HolonomyError> {
    let dim = amb.n() + 2;
    let mut bad = Vec::new();
    let mut stack: Vec<Vec<usize>> = Vec::new();
    for a in 0..dim {
        for b in a + 1..dim {
            stack.push(vec![a, b]);
        }
    }
    while let Some(idx) = stack.pop() {
        if idx.len() < k_max {
            for c in 0..dim {
                let mut child = idx.clone();
                child.push(c);
                stack.push(child);
            }
        }
        if !idx.contains(&T) || !transverse_count_filter(&idx, amb.n(), amb.parity()) {
            continue;
        }
        if !iterated_field(amb, &idx)?.at_base().is_zero() {
            bad.push(idx);
        }
    }
    bad.sort();
    Ok(bad)
}
