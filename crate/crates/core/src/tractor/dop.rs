use crate::ambient::{embed_x, restrict_to_x, AmbientMetricJet, T};
use crate::jetcalc::{Jet, Rational};
use crate::tensorgeo::{christoffel, metric_inverse, schouten, GeoError, TensorJet};

use super::{t_power, TractorError};

fn hessian_trace(v: &Jet, ginv: &TensorJet, gamma: &TensorJet) -> Result<Jet, GeoError> {
    let n = ginv.dim();
    let dv: Vec<Jet> = (0..n).map(|i| v.partial(i)).collect::<Result<_, _>>()?;
    let vars = v.vars();
    let mut lap = Jet::zero(vars, v.order().saturating_sub(2));
    for i in 0..n {
        for j in 0..n {
            let gij = ginv.get(&[i, j]);
            if gij.is_zero() {
                continue;
            }
            let mut h = dv[j].partial(i)?;
            for (k, dk) in dv.iter().enumerate() {
                h = &h - &(gamma.get(&[k, i, j]) * dk);
            }
            lap = &lap + &(gij * &h);
        }
    }
    Ok(lap)
}

/// `D_A V = w(n+2w−2) Y_A V + (n+2w−2) Z_A^a ∇_a V − X_A □V` with
/// `□V = Δ V + w J V`, as components in the slots `(ρ, t, x^i)`:
/// `(−□V, w(n+2w−2)V, (n+2w−2)∂_i V)`.
pub fn tractor_d_scale(g: &TensorJet, v: &Jet, w: &Rational) -> Result<Vec<Jet>, GeoError> {
    let n = g.dim();
    let ginv = metric_inverse(g)?;
    let gamma = christoffel(g, &ginv)?;
    let j = schouten(g, &ginv)?.j;
    let c = &Rational::from_integer(n as i64 - 2) + &(w * &Rational::from_integer(2));
    let boxv = &hessian_trace(v, &ginv, &gamma)? + &(&j * v).scale(w);
    let order = boxv.order();
    let mut out = vec![-&boxv, v.scale(&(w * &c)).truncate(order).with_order(order)];
    for i in 0..n {
        out.push(v.partial(i)?.scale(&c).truncate(order).with_order(order));
    }
    Ok(out)
}

/// `t^w V`, constant in `ρ`, on the ambient chart.
pub fn homogeneous_extension(amb: &AmbientMetricJet, v: &Jet, w: &Rational) -> Result<Jet, TractorError> {
    let geo = amb.geometry()?;
    let vars = geo.metric.chart().vars();
    let order = geo.metric.order().min(v.order());
    let e = embed_x(v, amb.n(), vars).truncate(order).with_order(order);
    Ok(&t_power(vars, w, order) * &e)
}

/// `D_A V = (n+2w−2) ∇̃_A Ṽ − X_A Δ̃Ṽ` along `ρ = 0, t = 1`, for a
/// homogeneous extension `Ṽ` of degree `w`.
pub fn tractor_d_ambient(amb: &AmbientMetricJet, vt: &Jet, w: &Rational) -> Result<Vec<Jet>, TractorError> {
    let geo = amb.geometry()?;
    let n = amb.n();
    let dim = n + 2;
    let vars = geo.metric.chart().vars();
    let c = &Rational::from_integer(n as i64 - 2) + &(w * &Rational::from_integer(2));
    let lap = hessian_trace(vt, &geo.inverse, &geo.christoffel)?;
    let t = &Jet::one(vars, geo.metric.order()) + &Jet::var(T, vars, geo.metric.order());
    let x_chart = amb.base_metric().chart();
    let mut out = Vec::with_capacity(dim);
    for a in 0..dim {
        let x_a = &t * geo.metric.get(&[a, T]);
        let d = &vt.partial(a)?.scale(&c) - &(&x_a * &lap);
        out.push(restrict_to_x(&d, x_chart));
    }
    let order = out.iter().map(Jet::order).min().unwrap_or(0);
    Ok(out.into_iter().map(|j| j.truncate(order).with_order(order)).collect())
}
