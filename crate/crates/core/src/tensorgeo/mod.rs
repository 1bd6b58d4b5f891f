//! Coordinate tensor calculus over jets.

mod curvature;
mod deriv;

pub use curvature::{
    bach, christoffel, cotton, metric_inverse, ricci, ricci_direct, riemann, scalar_curvature, schouten, weyl,
    SchoutenData,
};
pub use deriv::{covariant_derivative, lie_bracket, lie_derivative_metric};

use std::sync::Arc;

use thiserror::Error;

use crate::jetcalc::{Jet, JetError, Rational, Vars};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeoError {
    #[error("tensors live on different charts")]
    ChartMismatch,
    #[error("metric is degenerate at the base point")]
    DegenerateMetric,
    #[error("jet order exhausted: differentiating an order-{order} jet along a weight-{weight} variable")]
    OrderExhausted { order: u32, weight: u32 },
    #[error("Schouten tensor needs dimension at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("expected valence ({0}, {1}), got ({2}, {3})")]
    Valence(usize, usize, usize, usize),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Coordinate chart: variable names and grading; the base point is the origin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chart {
    names: Arc<[String]>,
    vars: Vars,
}

impl Chart {
    pub fn new(names: &[&str], vars: Vars) -> Self {
        assert_eq!(names.len(), vars.nvars(), "one name per variable");
        for (i, a) in names.iter().enumerate() {
            assert!(!names[..i].contains(a), "duplicate coordinate name {a}");
        }
        Chart { names: names.iter().map(|s| s.to_string()).collect(), vars }
    }

    /// Chart `x1..xn` with total-degree grading.
    pub fn standard(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Chart::new(&refs, Vars::uniform(n))
    }

    pub fn dim(&self) -> usize {
        self.vars.nvars()
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn names(&self) -> Vec<&str> {
        self.names.iter().map(String::as_str).collect()
    }

    pub fn with_vars(&self, vars: Vars) -> Chart {
        assert_eq!(vars.nvars(), self.dim());
        Chart { names: self.names.clone(), vars }
    }
}

/// Declared index symmetry between two slots (positions in the full index list).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

/// Tensor with `upper` contravariant and `lower` covariant indices whose
/// components are jets. Upper indices come first in the component layout.
/// Equality compares values; declared symmetries are bookkeeping only.
#[derive(Clone, Debug)]
pub struct TensorJet {
    chart: Chart,
    upper: usize,
    lower: usize,
    comps: Vec<Jet>,
    symmetries: Vec<Symmetry>,
}

impl PartialEq for TensorJet {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.upper == other.upper && self.lower == other.lower && self.comps == other.comps
    }
}

impl Eq for TensorJet {}

impl TensorJet {
    pub fn zeros(chart: &Chart, upper: usize, lower: usize, order: u32) -> Self {
        let n = chart.dim().pow((upper + lower) as u32);
        TensorJet {
            chart: chart.clone(),
            upper,
            lower,
            comps: vec![Jet::zero(chart.vars(), order); n],
            symmetries: Vec::new(),
        }
    }

    pub fn from_fn(chart: &Chart, upper: usize, lower: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let rank = upper + lower;
        let n = chart.dim();
        let comps = (0..n.pow(rank as u32))
            .map(|flat| {
                let idx = unflatten(flat, n, rank);
                let j = f(&idx);
                assert_eq!(j.vars(), chart.vars(), "component on the wrong chart");
                j
            })
            .collect();
        TensorJet { chart: chart.clone(), upper, lower, comps, symmetries: Vec::new() }
    }

    /// Scalar (rank 0) tensor.
    pub fn scalar(chart: &Chart, j: Jet) -> Self {
        TensorJet { chart: chart.clone(), upper: 0, lower: 0, comps: vec![j], symmetries: Vec::new() }
    }

    /// Constant (0,2) tensor from a matrix of rationals.
    pub fn constant_2form(chart: &Chart, m: &crate::linalg::Matrix, order: u32) -> Self {
        TensorJet::from_fn(chart, 0, 2, |i| Jet::constant(m[(i[0], i[1])].clone(), chart.vars(), order))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[self.flat(idx)]
    }

    /// Writes a component and, for declared symmetries, its partner slot.
    pub fn set(&mut self, idx: &[usize], j: Jet) {
        for s in self.symmetries.clone() {
            let (a, b, neg) = match s {
                Symmetry::Symmetric(a, b) => (a, b, false),
                Symmetry::Antisymmetric(a, b) => (a, b, true),
            };
            let mut other = idx.to_vec();
            other.swap(a, b);
            if other != idx {
                let f = self.flat(&other);
                self.comps[f] = if neg { -&j } else { j.clone() };
            }
        }
        let f = self.flat(idx);
        self.comps[f] = j;
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    /// (index list, component) pairs in layout order.
    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &Jet)> + '_ {
        let n = self.dim();
        let r = self.rank();
        self.comps.iter().enumerate().map(move |(f, j)| (unflatten(f, n, r), j))
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    /// Declares a symmetry; panics if the stored components violate it.
    pub fn with_symmetry(mut self, s: Symmetry) -> Self {
        self.symmetries.push(s);
        assert!(self.check_symmetries(), "declared symmetry {s:?} does not hold");
        self
    }

    /// Declares a symmetry if the stored components satisfy it.
    pub fn try_with_symmetry(mut self, s: Symmetry) -> Option<Self> {
        self.symmetries.push(s);
        self.check_symmetries().then_some(self)
    }

    pub fn check_symmetries(&self) -> bool {
        self.symmetries.iter().all(|s| {
            let (a, b, neg) = match *s {
                Symmetry::Symmetric(a, b) => (a, b, false),
                Symmetry::Antisymmetric(a, b) => (a, b, true),
            };
            self.indexed().all(|(idx, j)| {
                let mut other = idx.clone();
                other.swap(a, b);
                let k = self.get(&other);
                if neg {
                    (j + k).is_zero()
                } else {
                    j == k
                }
            })
        })
    }

    /// Smallest component order.
    pub fn order(&self) -> u32 {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_zero)
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map(|j| j.truncate(order))
    }

    pub fn map(&self, f: impl FnMut(&Jet) -> Jet) -> Self {
        TensorJet {
            chart: self.chart.clone(),
            upper: self.upper,
            lower: self.lower,
            comps: self.comps.iter().map(f).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|j| j.scale(c))
    }

    pub fn try_add(&self, other: &TensorJet) -> Result<Self, GeoError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &TensorJet) -> Result<Self, GeoError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &TensorJet, f: impl Fn(&Jet, &Jet) -> Jet) -> Result<Self, GeoError> {
        if self.chart != other.chart {
            return Err(GeoError::ChartMismatch);
        }
        if self.valence() != other.valence() {
            let (a, b) = self.valence();
            let (c, d) = other.valence();
            return Err(GeoError::Valence(a, b, c, d));
        }
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
        let symmetries = self.symmetries.iter().filter(|s| other.symmetries.contains(s)).copied().collect();
        Ok(TensorJet { chart: self.chart.clone(), upper: self.upper, lower: self.lower, comps, symmetries })
    }

    /// Constant terms of all components, in layout order.
    pub fn eval0(&self) -> Vec<Rational> {
        self.comps.iter().map(Jet::eval0).collect()
    }

    /// Constant part of a rank-2 tensor as a matrix.
    pub fn eval0_matrix(&self) -> crate::linalg::Matrix {
        assert_eq!(self.rank(), 2);
        let n = self.dim();
        crate::linalg::Matrix::from_fn(n, n, |i, j| self.get(&[i, j]).eval0())
    }

    /// Moves every component to another chart (see [`Jet::reindex`]).
    pub fn reindex(&self, target: &Chart, map: &[Option<usize>], order: u32) -> Self {
        TensorJet {
            chart: target.clone(),
            upper: self.upper,
            lower: self.lower,
            comps: self.comps.iter().map(|j| j.reindex(target.vars(), map, order)).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "wrong number of indices");
        let n = self.dim();
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < n);
            acc * n + i
        })
    }
}

fn unflatten(mut flat: usize, n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    idx
}

/// Sum of jet products, skipping zero factors.
pub(crate) fn dot<'a>(vars: Vars, order: u32, pairs: impl IntoIterator<Item = (&'a Jet, &'a Jet)>) -> Jet {
    let mut acc = Jet::zero(vars, order);
    for (a, b) in pairs {
        if a.is_zero() || b.is_zero() {
            acc = acc.with_order(acc.order().min(a.order().min(b.order())));
            continue;
        }
        acc = &acc + &(a * b);
    }
    acc
}
