use crate::jetcalc::{Jet, Rational};
use crate::tensorgeo::{
    christoffel, covariant_derivative, lie_derivative_metric, metric_inverse, ricci_direct, TensorJet,
};

use super::{assemble, restrict_to_x, t_jet, x_index, AmbientError, AmbientMetricJet, Grading, Parity, RHO, T};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StraightnessReport {
    /// Total degree through which `∇̃T − Id` was computed.
    pub order: u32,
    /// `(A, B)` with `∇̃_A T^B ≠ δ_A^B`.
    pub offending: Vec<(usize, usize)>,
}

impl StraightnessReport {
    pub fn holds(&self) -> bool {
        self.offending.is_empty()
    }
}

/// The Euler field `T = t∂_t` on the ambient chart.
pub fn euler_field(n: usize, vars: crate::jetcalc::Vars, order: u32) -> Vec<Jet> {
    (0..n + 2).map(|a| if a == T { t_jet(vars, order) } else { Jet::zero(vars, order) }).collect()
}

/// `∇̃T = Id`, checked componentwise.
pub fn check_straightness(amb: &AmbientMetricJet) -> Result<StraightnessReport, AmbientError> {
    let g = amb.conditions_metric(amb.total_order());
    let ginv = metric_inverse(&g)?;
    let gamma = christoffel(&g, &ginv)?;
    let vars = g.chart().vars();
    let field = euler_field(amb.n(), vars, g.order());
    let tf = TensorJet::from_fn(g.chart(), 1, 0, |i| field[i[0]].clone());
    let dt = covariant_derivative(&tf, &gamma)?;
    let order = dt.order();
    let mut offending = Vec::new();
    for (idx, c) in dt.indexed() {
        let (b, a) = (idx[0], idx[1]);
        let expected = if a == b { Jet::one(vars, order) } else { Jet::zero(vars, order) };
        if c != &expected {
            offending.push((a, b));
        }
    }
    Ok(StraightnessReport { order, offending })
}

/// The tangential block of `g̃` at `ρ = 0, t = 1` reproduces the input metric.
pub fn check_initial(amb: &AmbientMetricJet, g: &TensorJet) -> bool {
    let gt = amb.conditions_metric(amb.total_order());
    let n = amb.n();
    if g.dim() != n {
        return false;
    }
    let order = gt.order().min(g.order());
    (0..n).all(|i| {
        (0..n).all(|j| {
            let c = gt.get(&[x_index(i), x_index(j)]);
            let restricted = restrict_to_x(&c.filter_terms(|m| m.exponent(RHO) == 0 && m.exponent(T) == 0), g.chart());
            restricted.truncate(order) == g.get(&[i, j]).truncate(order)
        })
    })
}

/// `L_T g̃ = 2g̃`.
pub fn check_homogeneity(amb: &AmbientMetricJet) -> Result<bool, AmbientError> {
    let g = amb.conditions_metric(amb.total_order());
    let vars = g.chart().vars();
    let field = euler_field(amb.n(), vars, g.order());
    let tf = TensorJet::from_fn(g.chart(), 1, 0, |i| field[i[0]].clone());
    let lie = lie_derivative_metric(&g, &tf)?;
    let two = Rational::from_integer(2);
    let order = lie.order();
    Ok(lie.components().iter().zip(g.components()).all(|(l, c)| l.truncate(order) == c.truncate(order).scale(&two)))
}

/// `ρ^k` coefficient (raw monomial coefficient, at `t = 1`) of `Ric(g̃)`.
///
/// Each component is kept only to the x-degree that the solved data
/// determine: tangential components see the metric two weighted degrees
/// up, the mixed `ρi` components three, the `ρρ` component four.
#[derive(Clone, Debug)]
pub struct ResidualOrder {
    pub order: usize,
    pub tangential: TensorJet,
    /// `g^ij Ric_ij` of the tangential part.
    pub tangential_trace: Jet,
    /// `Ric_ρi`, when determined at this order.
    pub mixed: Option<TensorJet>,
    /// `Ric_ρρ`, when determined at this order.
    pub transverse: Option<Jet>,
    /// Every `Ric_tA` vanishes.
    pub t_row_vanishes: bool,
    /// The even-dimensional critical order, where only the pullback to
    /// `ρ = 0` is constrained and only to be trace-free.
    pub critical: bool,
}

impl ResidualOrder {
    pub fn is_zero(&self) -> bool {
        self.tangential.is_zero()
            && self.mixed.as_ref().is_none_or(TensorJet::is_zero)
            && self.transverse.as_ref().is_none_or(Jet::is_zero)
            && self.t_row_vanishes
    }

    /// Pulled back to `ρ = 0`, the residual is `π^*s` with `s` trace-free.
    pub fn is_tangential_tracefree(&self) -> bool {
        self.t_row_vanishes && self.tangential_trace.is_zero()
    }

    /// The Ricci condition that applies at this order.
    pub fn satisfies_condition(&self) -> bool {
        if self.critical {
            self.is_tangential_tracefree()
        } else {
            self.is_zero()
        }
    }
}

/// Highest `ρ`-order at which the Ricci conditions are checkable.
pub fn residual_depth(amb: &AmbientMetricJet) -> usize {
    amb.rho_order().saturating_sub(1)
}

pub fn ricci_residual(amb: &AmbientMetricJet, up_to: usize) -> Result<Vec<ResidualOrder>, AmbientError> {
    let available = residual_depth(amb);
    if up_to > available {
        return Err(AmbientError::BeyondSolve { requested: up_to, available });
    }
    let n = amb.n();
    let last = amb.rho_order() as u32;
    let known = match amb.parity() {
        Parity::Odd => amb.x_order().min(2 * last + 1),
        Parity::Even => amb.x_order(),
    };
    let claimed = known + 2;
    let x_chart = amb.base_metric().chart().clone();
    let mut padded: Vec<TensorJet> = (0..=last)
        .map(|m| {
            let c = amb.coefficient(m as usize).expect("solved coefficient");
            c.truncate(known - 2 * m).map(|j| j.with_order(claimed - 2 * m))
        })
        .collect();
    let mut m = last + 1;
    while 2 * m <= claimed {
        padded.push(TensorJet::zeros(&x_chart, 0, 2, claimed - 2 * m));
        m += 1;
    }
    let refs: Vec<&TensorJet> = padded.iter().collect();
    let gt = assemble(n, &refs, Grading::Solve, claimed);
    let ginv = metric_inverse(&gt)?;
    let gamma = christoffel(&gt, &ginv)?;
    let ric = ricci_direct(&gamma, &|_, _| true)?;
    let t_row_vanishes = (0..n + 2).all(|a| ric.get(&[T, a]).coefficient_of(T, 0).is_none_or(|c| c.is_zero()));

    let g = amb.base_metric();
    let gx_inv = metric_inverse(g)?;
    let critical = match amb.parity() {
        Parity::Even => Some(n / 2 - 1),
        Parity::Odd => None,
    };
    let slice = |c: &Jet, k: usize, cost: u32| -> Option<Jet> {
        let window = known.checked_sub(cost + 2 * k as u32)?;
        let s = c.coefficient_of(RHO, k as u32)?.coefficient_of(T, 0)?;
        Some(restrict_to_x(&s, &x_chart).truncate(window).with_order(window))
    };
    let mut out = Vec::with_capacity(up_to + 1);
    for k in 0..=up_to {
        let is_critical = critical == Some(k);
        let tangential = TensorJet::from_fn(&x_chart, 0, 2, |i| {
            slice(ric.get(&[x_index(i[0]), x_index(i[1])]), k, 2).expect("tangential window")
        });
        let order = tangential.order();
        let mut trace = Jet::zero(x_chart.vars(), order);
        for i in 0..n {
            for j in 0..n {
                trace = &trace + &(&gx_inv.get(&[i, j]).truncate(order) * tangential.get(&[i, j]));
            }
        }
        let mixed = (!is_critical)
            .then(|| {
                let comps: Option<Vec<Jet>> = (0..n).map(|i| slice(ric.get(&[RHO, x_index(i)]), k, 3)).collect();
                comps.map(|c| TensorJet::from_fn(&x_chart, 0, 1, |i| c[i[0]].clone()))
            })
            .flatten();
        let transverse = (!is_critical).then(|| slice(ric.get(&[RHO, RHO]), k, 4)).flatten();
        out.push(ResidualOrder {
            order: k,
            tangential,
            tangential_trace: trace,
            mixed,
            transverse,
            t_row_vanishes,
            critical: is_critical,
        });
    }
    Ok(out)
}

/// The trace-free residual at the critical order of an even-dimensional
/// ambient metric. It is reported raw; its relation to the Bach tensor in
/// dimension four is a fixed multiple established by the test suite.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub order_checked: usize,
    pub residual_coefficient: TensorJet,
    pub is_tracefree: bool,
    pub is_tangential: bool,
}

impl ObstructionReport {
    pub fn vanishes(&self) -> bool {
        self.residual_coefficient.is_zero()
    }
}

pub fn obstruction(amb: &AmbientMetricJet) -> Result<ObstructionReport, AmbientError> {
    if amb.parity() != Parity::Even {
        return Err(AmbientError::NotEven);
    }
    let k = amb.n() / 2 - 1;
    let res = ricci_residual(amb, k)?.pop().expect("one residual per order");
    Ok(ObstructionReport {
        order_checked: k,
        is_tracefree: res.tangential_trace.is_zero(),
        is_tangential: res.t_row_vanishes,
        residual_coefficient: res.tangential,
    })
}
