//! Ambient metrics in normal form: `g̃ = 2ρ dt² + 2t dt dρ + t² g_ρ`.
//!
//! Coordinates are ordered `(ρ, t, x1..xn)`; `t` is carried as the jet
//! variable `s = t − 1`, so the base point `z` is the origin.

mod checks;
mod solve;

pub use checks::{
    check_homogeneity, check_initial, check_straightness, euler_field, obstruction, residual_depth, ricci_residual,
    ObstructionReport, ResidualOrder, StraightnessReport,
};
pub use solve::build_ambient;

use std::sync::OnceLock;

use thiserror::Error;

use crate::jetcalc::{factorial, Jet, MultiIndex, Rational, Vars};
use crate::linalg::Matrix;
use crate::tensorgeo::{christoffel, metric_inverse, riemann, Chart, GeoError, TensorJet};

pub const RHO: usize = 0;
pub const T: usize = 1;

/// Chart index of `x^(i+1)`.
pub fn x_index(i: usize) -> usize {
    2 + i
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmbientError {
    #[error("dimension must be at least 3, got {0}")]
    Dimension(usize),
    #[error("signature ({p},{q}) does not add up to n = {n}")]
    Signature { p: usize, q: usize, n: usize },
    #[error("input metric is not symmetric")]
    NotSymmetric,
    #[error("input metric is degenerate at the base point")]
    Degenerate,
    #[error("input metric does not have signature ({p},{q})")]
    WrongSignature { p: usize, q: usize },
    #[error("x-jet order {got} is too small, need at least {needed}")]
    InsufficientOrder { needed: u32, got: u32 },
    #[error("even n = {n} needs rho order at least {needed}, got {got}")]
    RhoOrderTooSmall { n: usize, needed: usize, got: usize },
    #[error("linear system for the rho^{order} coefficient is singular")]
    Singular { order: usize },
    #[error("rho^{order} solve left a residual at x-degree {degree}")]
    NonConvergent { order: usize, degree: u32 },
    #[error("ambiguity tensor must be a symmetric 2-tensor on the base chart")]
    BadAmbiguity,
    #[error("ambiguity tensor only applies in even dimension")]
    AmbiguityOddDimension,
    #[error("the obstruction tensor exists only in even dimension")]
    NotEven,
    #[error("requested residual order {requested} beyond solve depth {available}")]
    BeyondSolve { requested: usize, available: usize },
    #[error(transparent)]
    Geo(#[from] GeoError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Jet grading of the ambient chart. `Solve` gives ρ weight 2 (one
/// ρ-order costs as much as two x-derivatives in the Ricci equations) and
/// caps `s = t − 1` at degree 2, so only values at `t = 1` of Ricci
/// components may be read from it. `Total` is the ordinary total degree
/// used for everything else.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Solve,
    Total,
}

pub fn ambient_chart(n: usize, grading: Grading) -> Chart {
    let mut names = vec!["rho".to_string(), "t".to_string()];
    names.extend((1..=n).map(|i| format!("x{i}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let vars = match grading {
        Grading::Total => Vars::uniform(n + 2),
        Grading::Solve => {
            let mut w = vec![2u8, 1];
            w.extend(std::iter::repeat_n(1, n));
            // g̃ is quadratic in t; the Ricci tensor at t = 1 needs nothing beyond s².
            Vars::weighted(&w).with_cap(T, 2)
        }
    };
    Chart::new(&refs, vars)
}

/// Deliberate damage to the metric seen by the condition checks; used only
/// as a negative control.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corruption {
    /// `g̃_11 += t² x1²`: still homogeneous and straight, wrong initial value.
    Initial,
    /// `g̃_11 += ρ t³`: wrong dilation weight (straightness fails with it).
    Homogeneity,
    /// `g̃_tρ = t (1 + x1)`: homogeneous, right initial value, not straight.
    Straightness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Full symmetric coefficient solved from the tangential Ricci equations.
    Full,
    /// Only the trace is determined; the trace-free part is the chosen ambiguity.
    Trace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveStep {
    pub order: usize,
    pub kind: StepKind,
    pub x_order: u32,
    pub refinements: usize,
}

/// Cached curvature data of the assembled metric in the total-degree grading.
#[derive(Clone, Debug)]
pub struct AmbientGeometry {
    pub metric: TensorJet,
    pub inverse: TensorJet,
    pub christoffel: TensorJet,
    pub riemann: TensorJet,
}

/// A solved ambient metric: the coefficients `g^(m)` of `ρ^m/m!` in `g_ρ`.
#[derive(Clone, Debug)]
pub struct AmbientMetricJet {
    n: usize,
    signature: (usize, usize),
    parity: Parity,
    x_order: u32,
    coeffs: Vec<TensorJet>,
    ambiguity: Option<TensorJet>,
    steps: Vec<SolveStep>,
    corruption: Option<Corruption>,
    geometry: OnceLock<Result<AmbientGeometry, GeoError>>,
}

impl AmbientMetricJet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// x-jet order of the input metric.
    pub fn x_order(&self) -> u32 {
        self.x_order
    }

    /// The input metric `g = g^(0)` on the x-chart.
    pub fn base_metric(&self) -> &TensorJet {
        &self.coeffs[0]
    }

    /// `g^(m)`; coefficients past the solved range are zero by construction.
    pub fn coefficient(&self, m: usize) -> Option<&TensorJet> {
        self.coeffs.get(m)
    }

    /// Highest stored coefficient index.
    pub fn rho_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn steps(&self) -> &[SolveStep] {
        &self.steps
    }

    pub fn ambiguity(&self) -> Option<&TensorJet> {
        self.ambiguity.as_ref()
    }

    /// `n/2 − 1` for even `n`.
    pub fn even_order_cap(&self) -> Option<usize> {
        (self.parity == Parity::Even).then(|| self.n / 2 - 1)
    }

    /// Largest total degree to which the assembled metric is fully known.
    /// For odd `n` the unsolved coefficients are unknown; for even `n` the
    /// coefficients past `n/2` are part of the chosen normalization (zero).
    pub fn total_order(&self) -> u32 {
        let m = self.rho_order() as u32;
        let from_x = self.x_order - m;
        match self.parity {
            Parity::Odd => from_x.min(m),
            Parity::Even => from_x,
        }
    }

    /// Assembled `(n+2)`-metric in the given grading, truncated at `order`.
    pub fn assemble(&self, grading: Grading, order: u32) -> TensorJet {
        let refs: Vec<&TensorJet> = self.coeffs.iter().collect();
        assemble(self.n, &refs, grading, order)
    }

    /// The assembled metric handed to the condition checks: identical to
    /// [`Self::assemble`] unless a negative control is armed.
    pub fn conditions_metric(&self, order: u32) -> TensorJet {
        let g = self.assemble(Grading::Total, order);
        match self.corruption {
            None => g,
            Some(c) => corrupt(&g, c),
        }
    }

    #[doc(hidden)]
    pub fn arm_negative_control(&mut self, c: Corruption) {
        self.corruption = Some(c);
    }

    /// Metric, inverse, Christoffel symbols and curvature at total degree
    /// [`Self::total_order`], computed once.
    pub fn geometry(&self) -> Result<&AmbientGeometry, GeoError> {
        self.geometry
            .get_or_init(|| {
                let metric = self.assemble(Grading::Total, self.total_order());
                let inverse = metric_inverse(&metric)?;
                let christoffel = christoffel(&metric, &inverse)?;
                let riemann = riemann(&christoffel)?;
                Ok(AmbientGeometry { metric, inverse, christoffel, riemann })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `g̃(z)` in the coordinate frame `(∂_ρ, ∂_t, ∂_x)`.
    pub fn metric_at_z(&self) -> Matrix {
        self.assemble(Grading::Total, 0).eval0_matrix()
    }
}

/// `t = 1 + s` as a jet.
pub(crate) fn t_jet(vars: Vars, order: u32) -> Jet {
    &Jet::one(vars, order) + &Jet::var(T, vars, order)
}

/// Moves an x-chart jet into the ambient chart.
pub(crate) fn embed_x(j: &Jet, n: usize, vars: Vars) -> Jet {
    let map: Vec<Option<usize>> = (0..n).map(|i| Some(x_index(i))).collect();
    j.reindex(vars, &map, j.order())
}

/// Restricts an ambient jet to `ρ = 0, t = 1`, as an x-chart jet.
pub(crate) fn restrict_to_x(j: &Jet, x_chart: &Chart) -> Jet {
    let n = x_chart.dim();
    let mut map = vec![None, None];
    map.extend((0..n).map(Some));
    // Every surviving monomial is pure x, whose ambient degree is its x-degree.
    j.reindex(x_chart.vars(), &map, j.order())
}

pub(crate) fn assemble(n: usize, coeffs: &[&TensorJet], grading: Grading, order: u32) -> TensorJet {
    let chart = ambient_chart(n, grading);
    let vars = chart.vars();
    let t = t_jet(vars, order);
    let t2 = &t * &t;
    let w_rho = vars.weight(RHO);
    let mut block = vec![Jet::zero(vars, order); n * n];
    for (m, c) in coeffs.iter().enumerate() {
        if m as u32 * w_rho > order {
            break;
        }
        let mono = MultiIndex::from_exponents(&{
            let mut e = vec![0; n + 2];
            e[RHO] = m as u32;
            e
        });
        let inv_fact = factorial(m as u32).recip().unwrap();
        for i in 0..n {
            for j in i..n {
                let term = embed_x(c.get(&[i, j]), n, vars).mul_monomial(mono, &inv_fact);
                block[i * n + j] = &block[i * n + j] + &term.truncate(order);
            }
        }
    }
    let rho = Jet::var(RHO, vars, order);
    TensorJet::from_fn(&chart, 0, 2, |idx| {
        let (a, b) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        match (a, b) {
            (RHO, RHO) => Jet::zero(vars, order),
            (RHO, T) => t.clone(),
            (T, T) => rho.scale(&Rational::from_integer(2)),
            (RHO, _) | (T, _) => Jet::zero(vars, order),
            _ => &t2 * &block[(a - 2) * n + (b - 2)],
        }
    })
}

fn corrupt(g: &TensorJet, c: Corruption) -> TensorJet {
    let chart = g.chart().clone();
    let vars = chart.vars();
    let order = g.order();
    let t = t_jet(vars, order);
    let x1 = Jet::var(x_index(0), vars, order);
    let rho = Jet::var(RHO, vars, order);
    let mut out = g.clone();
    let g11 = [x_index(0), x_index(0)];
    match c {
        Corruption::Initial => {
            let bump = &(&(&t * &t) * &x1) * &x1;
            out.set(&g11, g.get(&g11) + &bump);
        }
        Corruption::Homogeneity => {
            let bump = &(&(&t * &t) * &t) * &rho;
            out.set(&g11, g.get(&g11) + &bump);
        }
        Corruption::Straightness => {
            let v = &t * &(&Jet::one(vars, order) + &x1);
            out.set(&[T, RHO], v.clone());
            out.set(&[RHO, T], v);
        }
    }
    out
}
