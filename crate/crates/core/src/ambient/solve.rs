use std::sync::OnceLock;

use crate::jetcalc::{Jet, MultiIndex, Rational};
use crate::linalg::Matrix;
use crate::tensorgeo::{christoffel, metric_inverse, ricci_direct, Chart, GeoError, Symmetry, TensorJet};

use super::{assemble, restrict_to_x, AmbientError, AmbientMetricJet, Grading, Parity, SolveStep, StepKind, RHO, T};

/// Solves for the coefficients of `g_ρ` from the tangential Ricci equations.
///
/// `g` must be an x-chart metric jet with total-degree grading; its order
/// `X` fixes how far each coefficient is known (`g^(m)` to x-degree `X − 2m`).
/// For odd `n` the coefficients `1..=rho_order` are solved. For even `n`
/// the solve stops at `n/2`: steps below it are full, the step at `n/2`
/// only fixes the trace and takes its trace-free part from `ambiguity`
/// (zero when absent).
pub fn build_ambient(
    g: &TensorJet,
    signature: (usize, usize),
    rho_order: usize,
    ambiguity: Option<&TensorJet>,
) -> Result<AmbientMetricJet, AmbientError> {
    let n = g.dim();
    if n < 3 {
        return Err(AmbientError::Dimension(n));
    }
    let (p, q) = signature;
    if p + q != n {
        return Err(AmbientError::Signature { p, q, n });
    }
    if g.valence() != (0, 2) {
        let (a, b) = g.valence();
        return Err(GeoError::Valence(0, 2, a, b).into());
    }
    if !g.chart().vars().is_uniform() {
        return Err(GeoError::ChartMismatch.into());
    }
    let g = g.clone().try_with_symmetry(Symmetry::Symmetric(0, 1)).ok_or(AmbientError::NotSymmetric)?;
    let inertia = g.eval0_matrix().inertia();
    if inertia.zero > 0 {
        return Err(AmbientError::Degenerate);
    }
    if (inertia.positive, inertia.negative) != (p, q) {
        return Err(AmbientError::WrongSignature { p, q });
    }

    let parity = Parity::of(n);
    let x_order = g.order();
    let last = match parity {
        Parity::Odd => rho_order,
        Parity::Even => {
            if rho_order < n / 2 {
                return Err(AmbientError::RhoOrderTooSmall { n, needed: n / 2, got: rho_order });
            }
            n / 2
        }
    };
    let needed = 2 * last as u32;
    if x_order < needed {
        return Err(AmbientError::InsufficientOrder { needed, got: x_order });
    }
    if parity == Parity::Odd && ambiguity.is_some() {
        return Err(AmbientError::AmbiguityOddDimension);
    }

    let chart = g.chart().clone();
    let mut solver = Solver { n, chart: chart.clone(), x_order, coeffs: vec![g.clone()] };
    let mut steps = Vec::with_capacity(last);
    let mut projected = None;
    for m in 1..=last {
        let step = if parity == Parity::Even && m == last {
            let a = match ambiguity {
                Some(a0) => Some(project_tracefree(&g, a0, x_order - 2 * m as u32)?),
                None => None,
            };
            let s = solver.trace_step(m, a.as_ref())?;
            projected = a;
            s
        } else {
            solver.full_step(m)?
        };
        steps.push(step);
    }

    Ok(AmbientMetricJet {
        n,
        signature,
        parity,
        x_order,
        coeffs: solver.coeffs,
        ambiguity: projected,
        steps,
        corruption: None,
        geometry: OnceLock::new(),
    })
}

/// `a0 − (tr_g a0 / n) g`, truncated to `order`.
fn project_tracefree(g: &TensorJet, a0: &TensorJet, order: u32) -> Result<TensorJet, AmbientError> {
    if a0.chart() != g.chart() || a0.valence() != (0, 2) {
        return Err(AmbientError::BadAmbiguity);
    }
    let a0 = a0.clone().try_with_symmetry(Symmetry::Symmetric(0, 1)).ok_or(AmbientError::BadAmbiguity)?;
    let n = g.dim();
    let ginv = metric_inverse(&g.truncate(order))?;
    let vars = g.chart().vars();
    let mut tr = Jet::zero(vars, order);
    for i in 0..n {
        for j in 0..n {
            tr = &tr + &(ginv.get(&[i, j]) * &a0.get(&[i, j]).truncate(order));
        }
    }
    let c = tr.scale(&Rational::new(1, n as i64));
    Ok(TensorJet::from_fn(g.chart(), 0, 2, |i| &a0.get(i).truncate(order) - &(&c * &g.get(i).truncate(order)))
        .with_symmetry(Symmetry::Symmetric(0, 1)))
}

/// Upper-triangle index pairs of an `n × n` symmetric matrix.
fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
}

/// Which Ricci equations fix a coefficient `g^(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Equations {
    /// Tangential components at `ρ^(m−1)`, plus `ρρ` at `ρ^(m−2)` once
    /// `m ≥ 2`. The tangential trace degenerates at `m = n`, which the
    /// `ρρ` row covers.
    Full,
    /// Only `ρρ` at `ρ^(m−2)`; fixes the trace at the critical even order.
    Transverse,
}

struct Solver {
    n: usize,
    chart: Chart,
    x_order: u32,
    coeffs: Vec<TensorJet>,
}

impl Solver {
    /// Equation rows for the metric whose coefficients `0..m` are the solved
    /// ones truncated to weighted degree `2m + j` and whose `m`-th
    /// coefficient is `h`.
    ///
    /// Every coefficient is claimed to weighted order `2m + j + 2`. The
    /// extra two degrees are padding: a Ricci component at weighted degree
    /// `d` only sees metric coefficients up to degree `d + 4` (`d + 2` for
    /// tangential components), while the jet bookkeeping would otherwise
    /// lose two more degrees to the `ρ`-derivatives hidden in `g̃^ρρ = −2ρ/t²`.
    fn residual(&self, m: usize, j: u32, h: &TensorJet, eqs: Equations) -> Result<Vec<Jet>, AmbientError> {
        let m32 = m as u32;
        let known = 2 * m32 + j;
        let claimed = known + 2;
        let mut padded: Vec<TensorJet> = self.coeffs[..m]
            .iter()
            .enumerate()
            .map(|(i, c)| c.truncate(known - 2 * i as u32).map(|jet| jet.with_order(claimed - 2 * i as u32)))
            .collect();
        padded.push(h.map(|jet| jet.with_order(j + 2)));
        padded.push(TensorJet::zeros(&self.chart, 0, 2, j));
        let refs: Vec<&TensorJet> = padded.iter().collect();
        let rows = ricci_rows(self.n, &refs, claimed, m32, eqs, &self.chart)?;
        Ok(rows.into_iter().map(|r| r.truncate(j)).collect())
    }

    /// Linear part at the base point of `u ↦ residual(Σ u_c basis_c)`,
    /// probed on the x-constant metric `g(0)`.
    fn probe(&self, m: usize, eqs: Equations, basis: &[Matrix]) -> Result<Matrix, AmbientError> {
        let g0 = self.coeffs[0].eval0_matrix();
        let m32 = m as u32;
        let order = 2 * m32 + 2;
        let base = TensorJet::constant_2form(&self.chart, &g0, order);
        let column = |h: &TensorJet| -> Result<Vec<Rational>, AmbientError> {
            let mut cs: Vec<TensorJet> = vec![base.clone()];
            for _ in 1..m {
                cs.push(TensorJet::zeros(&self.chart, 0, 2, order));
            }
            cs.push(h.clone());
            let refs: Vec<&TensorJet> = cs.iter().collect();
            let r = ricci_rows(self.n, &refs, order, m32, eqs, &self.chart)?;
            Ok(r.iter().map(Jet::eval0).collect())
        };
        let r0 = column(&TensorJet::zeros(&self.chart, 0, 2, order))?;
        let mut a = Matrix::zeros(r0.len(), basis.len());
        for (col, e) in basis.iter().enumerate() {
            let r = column(&TensorJet::constant_2form(&self.chart, e, order))?;
            for row in 0..r0.len() {
                a[(row, col)] = &r[row] - &r0[row];
            }
        }
        Ok(a)
    }

    /// Solves for `g^(m) = offset + Σ u_c basis_c` with scalar jets `u_c`,
    /// one x-degree at a time. At degree `j` the residual is exactly linear
    /// in the degree-`j` part of `u`, with the matrix probed at the base point.
    fn step(
        &mut self,
        m: usize,
        eqs: Equations,
        basis: &[TensorJet],
        offset: &TensorJet,
        kind: StepKind,
    ) -> Result<SolveStep, AmbientError> {
        let target = self.x_order - 2 * m as u32;
        let at_zero: Vec<Matrix> = basis.iter().map(TensorJet::eval0_matrix).collect();
        let a = self.probe(m, eqs, &at_zero)?;
        let (left, kernel) = a.left_inverse().ok_or(AmbientError::Singular { order: m })?;
        let vars = self.chart.vars();
        let mut u: Vec<Jet> = vec![Jet::zero(vars, target); basis.len()];
        let combine = |u: &[Jet], order: u32| -> TensorJet {
            TensorJet::from_fn(&self.chart, 0, 2, |i| {
                u.iter().zip(basis).fold(offset.get(i).with_order(order), |acc, (c, b)| {
                    if c.is_zero() {
                        acc
                    } else {
                        &acc + &(&c.with_order(order) * &b.get(i).with_order(order))
                    }
                })
            })
        };
        for j in 0..=target {
            let r = self.residual(m, j, &combine(&u, j), eqs)?;
            if let Some(d) = r.iter().flat_map(|c| c.terms().map(|(mono, _)| mono.total_degree())).find(|&d| d < j) {
                return Err(AmbientError::NonConvergent { order: m, degree: d });
            }
            for mono in top_monomials(&r, j) {
                let rhs: Vec<Rational> = r.iter().map(|c| -c.coeff(mono)).collect();
                if kernel.mul_vec(&rhs).iter().any(|x| !x.is_zero()) {
                    return Err(AmbientError::NonConvergent { order: m, degree: j });
                }
                for (slot, d) in u.iter_mut().zip(left.mul_vec(&rhs)) {
                    if !d.is_zero() {
                        *slot = &*slot + &Jet::monomial(mono, d, vars, target);
                    }
                }
            }
        }
        let h = combine(&u, target).with_symmetry(Symmetry::Symmetric(0, 1));
        self.coeffs.push(h);
        Ok(SolveStep { order: m, kind, x_order: target, refinements: target as usize + 1 })
    }

    fn full_step(&mut self, m: usize) -> Result<SolveStep, AmbientError> {
        let target = self.x_order - 2 * m as u32;
        let basis: Vec<TensorJet> =
            sym_pairs(self.n).into_iter().map(|(p, q)| unit_symmetric(&self.chart, p, q, target)).collect();
        let zero = TensorJet::zeros(&self.chart, 0, 2, target);
        self.step(m, Equations::Full, &basis, &zero, StepKind::Full)
    }

    /// Even-dimensional critical step: `h = (σ/n) g + a`, with `σ` fixed by
    /// the `ρρ` equation and the trace-free `a` chosen freely.
    fn trace_step(&mut self, m: usize, a: Option<&TensorJet>) -> Result<SolveStep, AmbientError> {
        let target = self.x_order - 2 * m as u32;
        let inv_n = Rational::new(1, self.n as i64);
        let basis = [self.coeffs[0].truncate(target).scale(&inv_n)];
        let offset = a.cloned().unwrap_or_else(|| TensorJet::zeros(&self.chart, 0, 2, target));
        self.step(m, Equations::Transverse, &basis, &offset, StepKind::Trace)
    }
}

fn unit_symmetric(chart: &Chart, p: usize, q: usize, order: u32) -> TensorJet {
    let vars = chart.vars();
    TensorJet::from_fn(chart, 0, 2, |i| {
        if (i[0], i[1]) == (p, q) || (i[0], i[1]) == (q, p) {
            Jet::one(vars, order)
        } else {
            Jet::zero(vars, order)
        }
    })
}

/// Raw `ρ`-coefficients at `t = 1` of the Ricci components selected by
/// `eqs`, on the x-chart: tangential ones at `ρ^(m−1)` in upper-triangle
/// order, then `ρρ` at `ρ^(m−2)`.
fn ricci_rows(
    n: usize,
    coeffs: &[&TensorJet],
    order: u32,
    m: u32,
    eqs: Equations,
    x_chart: &Chart,
) -> Result<Vec<Jet>, AmbientError> {
    let gt = assemble(n, coeffs, Grading::Solve, order);
    let ginv = metric_inverse(&gt)?;
    let gamma = christoffel(&gt, &ginv)?;
    let tangential = eqs == Equations::Full;
    let transverse = m >= 2;
    let ric = ricci_direct(&gamma, &|a, b| (tangential && a >= 2 && b >= 2) || (transverse && a == RHO && b == RHO))?;
    let slice = |c: &Jet, k: u32| -> Result<Jet, AmbientError> {
        let s = c
            .coefficient_of(RHO, k)
            .and_then(|c| c.coefficient_of(T, 0))
            .ok_or(GeoError::OrderExhausted { order: c.order(), weight: 2 * k })?;
        Ok(restrict_to_x(&s, x_chart))
    };
    let mut rows = Vec::new();
    if tangential {
        for (a, b) in sym_pairs(n) {
            rows.push(slice(ric.get(&[a + 2, b + 2]), m - 1)?);
        }
    }
    if transverse {
        rows.push(slice(ric.get(&[RHO, RHO]), m - 2)?);
    }
    Ok(rows)
}

fn top_monomials(r: &[Jet], j: u32) -> Vec<MultiIndex> {
    let mut monos: Vec<MultiIndex> =
        r.iter().flat_map(|c| c.terms().map(|(mono, _)| mono)).filter(|mono| mono.total_degree() == j).collect();
    monos.sort_unstable();
    monos.dedup();
    monos
}
