use crate::jetcalc::Jet;

use super::{dot, GeoError, TensorJet};

/// `∇T` with the new covariant index appended last:
/// `(∇T)^{a..}_{b.. d} = ∂_d T + Γ^a_{dm} T^{m..} − Γ^m_{d b} T_{m..}`.
pub fn covariant_derivative(t: &TensorJet, gamma: &TensorJet) -> Result<TensorJet, GeoError> {
    if t.chart() != gamma.chart() {
        return Err(GeoError::ChartMismatch);
    }
    let (a, b) = gamma.valence();
    if (a, b) != (1, 2) {
        return Err(GeoError::Valence(1, 2, a, b));
    }
    let n = t.dim();
    let vars = t.chart().vars();
    let order = t.order();
    for d in 0..n {
        let weight = vars.weight(d);
        if order < weight {
            return Err(GeoError::OrderExhausted { order, weight });
        }
    }
    let (upper, _) = t.valence();
    let rank = t.rank();
    let mut out = TensorJet::zeros(t.chart(), upper, t.valence().1 + 1, 0);
    let mut err = None;
    let comps: Vec<Jet> = out
        .indexed()
        .map(|(idx, _)| {
            let (base, d) = (&idx[..rank], idx[rank]);
            let mut v = match t.get(base).partial(d) {
                Ok(j) => j,
                Err(e) => {
                    err = Some(e);
                    return Jet::zero(vars, 0);
                }
            };
            let mut moved = base.to_vec();
            for s in 0..rank {
                let orig = base[s];
                let mut sum = Jet::zero(vars, order);
                for m in 0..n {
                    moved[s] = m;
                    let comp = t.get(&moved);
                    let g = if s < upper { gamma.get(&[orig, d, m]) } else { gamma.get(&[m, d, orig]) };
                    if g.is_zero() || comp.is_zero() {
                        sum = sum.with_order(sum.order().min(g.order()).min(comp.order()));
                    } else {
                        sum = &sum + &(g * comp);
                    }
                }
                moved[s] = orig;
                v = if s < upper { &v + &sum } else { &v - &sum };
            }
            v
        })
        .collect();
    if let Some(e) = err {
        return Err(e.into());
    }
    out.comps = comps;
    Ok(out)
}

/// `(L_V g)_ab = V^c ∂_c g_ab + g_cb ∂_a V^c + g_ac ∂_b V^c` for a (0,2) tensor.
pub fn lie_derivative_metric(g: &TensorJet, v: &TensorJet) -> Result<TensorJet, GeoError> {
    if g.chart() != v.chart() {
        return Err(GeoError::ChartMismatch);
    }
    let n = g.dim();
    let vars = g.chart().vars();
    let order = g.order().min(v.order());
    let dv: Vec<Vec<Jet>> =
        (0..n).map(|c| (0..n).map(|a| v.get(&[c]).partial(a)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let mut dg = Vec::with_capacity(n);
    for c in 0..n {
        dg.push(g.components().iter().map(|j| j.partial(c)).collect::<Result<Vec<_>, _>>()?);
    }
    let mut out = TensorJet::zeros(g.chart(), 0, 2, 0);
    out.comps = (0..n * n)
        .map(|f| {
            let (a, b) = (f / n, f % n);
            let transport = dot(vars, order, (0..n).map(|c| (v.get(&[c]), &dg[c][f])));
            let left = dot(vars, order, (0..n).map(|c| (g.get(&[c, b]), &dv[c][a])));
            let right = dot(vars, order, (0..n).map(|c| (g.get(&[a, c]), &dv[c][b])));
            &(&transport + &left) + &right
        })
        .collect();
    Ok(out)
}

/// `[U, V]^a = U^c ∂_c V^a − V^c ∂_c U^a`.
pub fn lie_bracket(u: &TensorJet, v: &TensorJet) -> Result<TensorJet, GeoError> {
    if u.chart() != v.chart() {
        return Err(GeoError::ChartMismatch);
    }
    let n = u.dim();
    let vars = u.chart().vars();
    let order = u.order().min(v.order());
    let mut comps = Vec::with_capacity(n);
    for a in 0..n {
        let dva: Vec<Jet> = (0..n).map(|c| v.get(&[a]).partial(c)).collect::<Result<_, _>>()?;
        let dua: Vec<Jet> = (0..n).map(|c| u.get(&[a]).partial(c)).collect::<Result<_, _>>()?;
        let x = dot(vars, order, (0..n).map(|c| (u.get(&[c]), &dva[c])));
        let y = dot(vars, order, (0..n).map(|c| (v.get(&[c]), &dua[c])));
        comps.push(&x - &y);
    }
    let mut out = TensorJet::zeros(u.chart(), 1, 0, 0);
    out.comps = comps;
    Ok(out)
}
