use crate::ambient::{AmbientMetricJet, RHO};
use crate::holonomy::{EndoField, HolonomySpan};
use crate::jetcalc::{Jet, Rational};
use crate::linalg::Matrix;
use crate::tensorgeo::{christoffel, metric_inverse, schouten, GeoError, TensorJet};

use super::{ambient_curvature_along_g, scale_connection_matrices, scale_curvature, TractorError, TractorJet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpReport {
    /// x-order through which both sides were compared.
    pub order: u32,
    /// Frame slot pairs `(A, B)` where the two sides differ.
    pub mismatched: Vec<(usize, usize)>,
}

impl GpReport {
    pub fn holds(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Coupled divergence `g^{cd} ∇_d F_cb`, with the tractor connection on the
/// endomorphism part and Levi-Civita on the form indices.
fn divergence(g: &TensorJet, f: &[Vec<EndoField>], conns: &[EndoField]) -> Result<Vec<EndoField>, GeoError> {
    let n = g.dim();
    let ginv = metric_inverse(g)?;
    let gamma = christoffel(g, &ginv)?;
    let dim = n + 2;
    let vars = g.chart().vars();
    let mut out = Vec::with_capacity(n);
    for b in 0..n {
        let mut acc: Option<EndoField> = None;
        for c in 0..n {
            for d in 0..n {
                let gcd = ginv.get(&[c, d]);
                if gcd.is_zero() {
                    continue;
                }
                let base = f[c][b].covariant_partial(d, &conns[d])?;
                let order = base.order();
                let term = EndoField::from_fn(dim, |p, q| {
                    let mut v = base.get(p, q).clone();
                    for e in 0..n {
                        v = &v - &(gamma.get(&[e, d, c]) * f[e][b].get(p, q));
                        v = &v - &(gamma.get(&[e, d, b]) * f[c][e].get(p, q));
                    }
                    &v.truncate(order).with_order(order) * gcd
                });
                acc = Some(match acc {
                    None => term,
                    Some(a) => EndoField::from_fn(dim, |p, q| a.get(p, q) + term.get(p, q)),
                });
            }
        }
        out.push(acc.unwrap_or_else(|| EndoField::from_fn(dim, |_, _| Jet::zero(vars, 0))));
    }
    Ok(out)
}

/// Compares `R̃(∂_A, ∂_B)` along `G` with
/// `Z_A^a Z_B^b F_ab − (2/(n−4)) X_[A Z_B]^b ∇^c F_cb`.
pub fn gp_curvature_identity_check(amb: &AmbientMetricJet, g: &TensorJet) -> Result<GpReport, TractorError> {
    let n = amb.n();
    if n == 4 {
        return Err(TractorError::DimensionFour);
    }
    let dim = n + 2;
    let lhs = ambient_curvature_along_g(amb)?;
    let lhs_order = lhs.iter().flatten().map(EndoField::order).min().unwrap_or(0);
    // the divergence of the curvature takes four derivatives of g
    let g = &g.truncate(g.order().min(lhs_order + 4));
    let conns = scale_connection_matrices(g)?;
    let f = scale_curvature(g)?;
    let div = divergence(g, &f, &conns)?;
    let factor = Rational::new(-1, n as i64 - 4);
    let vars = g.chart().vars();
    let rhs = |a: usize, b: usize| -> EndoField {
        match (a, b) {
            (a, b) if a >= 2 && b >= 2 => f[a - 2][b - 2].clone(),
            (RHO, b) if b >= 2 => div[b - 2].map(|j| j.scale(&factor)),
            (a, RHO) if a >= 2 => div[a - 2].map(|j| -&j.scale(&factor)),
            _ => EndoField::from_fn(dim, |_, _| Jet::zero(vars, u32::MAX)),
        }
    };
    let order = lhs.iter().flatten().map(EndoField::order).chain(div.iter().map(EndoField::order)).min().unwrap_or(0);
    let mut mismatched = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            let l = lhs[a][b].map(|j| j.truncate(order));
            let r = rhs(a, b).map(|j| j.truncate(order).with_order(l.order()));
            if (0..dim).any(|p| (0..dim).any(|q| l.get(p, q) != r.get(p, q))) {
                mismatched.push((a, b));
            }
        }
    }
    Ok(GpReport { order, mismatched })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelTractor {
    pub vector: Vec<Rational>,
    /// `h(v, v)`.
    pub norm: Rational,
}

/// Common kernel of every element of the span.
pub fn parallel_tractor_detect(span: &HolonomySpan, h: &Matrix) -> Vec<ParallelTractor> {
    let size = span.size();
    let mut rows = Vec::new();
    for m in span.basis() {
        for i in 0..size {
            rows.push(m.row(i).to_vec());
        }
    }
    if rows.is_empty() {
        rows.push(vec![Rational::zero(); size]);
    }
    Matrix::from_rows(rows)
        .nullspace()
        .into_iter()
        .map(|v| {
            let hv = h.mul_vec(&v);
            let mut norm = Rational::zero();
            for (a, b) in v.iter().zip(&hv) {
                norm += &(a * b);
            }
            ParallelTractor { vector: v, norm }
        })
        .collect()
}

/// The scale tractor `(1, −J/n, 0)` of the input metric; parallel exactly
/// when the metric is Einstein.
pub fn einstein_tractor(g: &TensorJet) -> Result<TractorJet, GeoError> {
    let n = g.dim();
    let ginv = metric_inverse(g)?;
    let j = schouten(g, &ginv)?.j;
    let vars = g.chart().vars();
    let order = j.order();
    let mut comps = vec![Jet::one(vars, order), -&j.scale(&Rational::new(1, n as i64))];
    comps.extend((0..n).map(|_| Jet::zero(vars, order)));
    Ok(TractorJet::new(Rational::zero(), comps))
}
