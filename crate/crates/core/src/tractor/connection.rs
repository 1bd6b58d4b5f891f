use crate::ambient::{restrict_to_x, AmbientMetricJet};
use crate::holonomy::{EndoField, HolonomyError, HolonomySpan};
use crate::jetcalc::Jet;
use crate::tensorgeo::{christoffel, metric_inverse, schouten, GeoError, TensorJet};

use super::{invariant_lift, TractorError, TractorJet};

/// `Γ̃^P_{(x^d) Q}` along `ρ = 0, t = 1`, one matrix per coordinate `x^d`.
pub fn ambient_connection_matrices(amb: &AmbientMetricJet) -> Result<Vec<EndoField>, TractorError> {
    let gamma = &amb.geometry()?.christoffel;
    let x_chart = amb.base_metric().chart();
    let dim = amb.n() + 2;
    Ok((0..amb.n())
        .map(|d| EndoField::from_fn(dim, |p, q| restrict_to_x(gamma.get(&[p, 2 + d, q]), x_chart)))
        .collect())
}

/// `R̃(∂_A, ∂_B)` along `ρ = 0, t = 1`, for all frame slots `A, B`.
pub fn ambient_curvature_along_g(amb: &AmbientMetricJet) -> Result<Vec<Vec<EndoField>>, TractorError> {
    let r = &amb.geometry()?.riemann;
    let x_chart = amb.base_metric().chart();
    let dim = amb.n() + 2;
    Ok((0..dim)
        .map(|a| {
            (0..dim).map(|b| EndoField::from_fn(dim, |p, q| restrict_to_x(r.get(&[p, q, a, b]), x_chart))).collect()
        })
        .collect())
}

/// `∇̃_η̄ Ũ` as an ambient field, for the lift `η̄` and the homogeneous
/// extension `Ũ`.
pub fn tractor_connection_ambient_field(
    amb: &AmbientMetricJet,
    eta: &[Jet],
    u: &TractorJet,
) -> Result<Vec<Jet>, TractorError> {
    let geo = amb.geometry()?;
    let chart = geo.metric.chart();
    let order = geo.christoffel.order();
    let dim = amb.n() + 2;
    if eta.len() != amb.n() || u.comps.len() != dim {
        return Err(TractorError::Components { expected: dim, got: u.comps.len() });
    }
    let lift = invariant_lift(eta, chart, order);
    let ut = u.extend(chart, order + 1);
    let vars = chart.vars();
    let mut out = Vec::with_capacity(dim);
    for p in 0..dim {
        let mut acc = Jet::zero(vars, order);
        for (c, l) in lift.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let mut inner = ut[p].partial(c)?;
            for (q, uq) in ut.iter().enumerate() {
                inner = &inner + &(geo.christoffel.get(&[p, c, q]) * uq);
            }
            acc = &acc + &(l * &inner);
        }
        out.push(acc);
    }
    Ok(out)
}

pub fn tractor_connection_ambient(
    amb: &AmbientMetricJet,
    eta: &[Jet],
    u: &TractorJet,
) -> Result<TractorJet, TractorError> {
    let field = tractor_connection_ambient_field(amb, eta, u)?;
    Ok(TractorJet::restrict(&field, u.weight.clone(), amb.base_metric().chart()))
}

/// Scale-form connection matrices: for `u = (σ, ρ, μ)` in the slots above,
/// `∇_d u = (∂_dσ − μ_d, ∂_dρ − P_dk μ^k, ∇_d μ^b + P_d^b σ + δ_d^b ρ)`.
pub fn scale_connection_matrices(g: &TensorJet) -> Result<Vec<EndoField>, GeoError> {
    let n = g.dim();
    let ginv = metric_inverse(g)?;
    let gamma = christoffel(g, &ginv)?;
    let p = schouten(g, &ginv)?.p;
    let vars = g.chart().vars();
    let order = p.order();
    let dim = n + 2;
    let mut out = Vec::with_capacity(n);
    for d in 0..n {
        let p_up: Vec<Jet> = (0..n)
            .map(|b| {
                let mut acc = Jet::zero(vars, order);
                for k in 0..n {
                    acc = &acc + &(ginv.get(&[b, k]) * p.get(&[d, k]));
                }
                acc
            })
            .collect();
        out.push(EndoField::from_fn(dim, |row, col| {
            let z = Jet::zero(vars, order);
            match (row, col) {
                (0, c) if c >= 2 => -&g.get(&[d, c - 2]).truncate(order).with_order(order),
                (1, c) if c >= 2 => -p.get(&[d, c - 2]),
                (r, 0) if r >= 2 => p_up[r - 2].clone(),
                (r, 1) if r >= 2 && r - 2 == d => Jet::one(vars, order),
                (r, c) if r >= 2 && c >= 2 => gamma.get(&[r - 2, d, c - 2]).truncate(order).with_order(order),
                _ => z,
            }
        }));
    }
    Ok(out)
}

fn apply(conns: &[EndoField], eta: &[Jet], u: &TractorJet) -> Result<TractorJet, GeoError> {
    let dim = u.comps.len();
    let vars = u.comps[0].vars();
    let order = conns[0].order().min(u.order().saturating_sub(1));
    let mut out = vec![Jet::zero(vars, order); dim];
    for (d, e) in eta.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        for p in 0..dim {
            let mut inner = u.comps[p].partial(d)?;
            for q in 0..dim {
                inner = &inner + &(conns[d].get(p, q) * &u.comps[q]);
            }
            out[p] = &out[p] + &(e * &inner);
        }
    }
    Ok(TractorJet::new(u.weight.clone(), out))
}

pub fn tractor_connection_scale(g: &TensorJet, eta: &[Jet], u: &TractorJet) -> Result<TractorJet, TractorError> {
    let dim = g.dim() + 2;
    if u.comps.len() != dim {
        return Err(TractorError::Components { expected: dim, got: u.comps.len() });
    }
    let conns = scale_connection_matrices(g)?;
    Ok(apply(&conns, eta, u)?)
}

/// `F_ab = ∂_a A_b − ∂_b A_a + [A_a, A_b]`.
pub fn scale_curvature(g: &TensorJet) -> Result<Vec<Vec<EndoField>>, GeoError> {
    let conns = scale_connection_matrices(g)?;
    let n = g.dim();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            // ∂_a A_b + [A_a, A_b] − ∂_b A_a
            let x = conns[b].covariant_partial(a, &conns[a])?;
            let y: Vec<Jet> = (0..(n + 2) * (n + 2))
                .map(|k| conns[a].get(k / (n + 2), k % (n + 2)).partial(b))
                .collect::<Result<_, _>>()?;
            row.push(EndoField::from_fn(n + 2, |p, q| x.get(p, q) - &y[p * (n + 2) + q]));
        }
        out.push(row);
    }
    Ok(out)
}

/// Holonomy span computed from the scale-form connection alone: nested
/// derivatives of `F` along the coordinate fields, at `x = 0`. Multi-indices
/// are labelled with frame slots `2 + i`.
pub fn tractor_holonomy_scale(g: &TensorJet, k_max: usize) -> Result<HolonomySpan, TractorError> {
    let n = g.dim();
    let available = g.order().saturating_sub(1) as usize;
    if k_max > available {
        return Err(HolonomyError::Budget { needed: k_max, available }.into());
    }
    let conns = scale_connection_matrices(g)?;
    let f = scale_curvature(g)?;
    let mut span = HolonomySpan::new(n + 2);
    if k_max < 2 {
        return Ok(span);
    }
    let mut level = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let idx = vec![2 + a, 2 + b];
            span.offer(idx.clone(), &f[a][b].at_base());
            level.push((idx, f[a][b].clone()));
        }
    }
    span.close_order(2);
    for k in 3..=k_max {
        let mut next = Vec::new();
        for (idx, e) in &level {
            for c in 0..n {
                let mut child = idx.clone();
                child.push(2 + c);
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
