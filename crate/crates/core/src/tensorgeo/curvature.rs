use crate::jetcalc::{Jet, Rational};

use super::{dot, GeoError, Symmetry, TensorJet};

fn expect_valence(t: &TensorJet, upper: usize, lower: usize) -> Result<(), GeoError> {
    let (a, b) = t.valence();
    if (a, b) != (upper, lower) {
        return Err(GeoError::Valence(upper, lower, a, b));
    }
    Ok(())
}

/// Inverse metric by Gauss–Jordan elimination over jets. Pivots are chosen
/// with invertible constant term, so split signatures with zero diagonal
/// entries at the base point are fine.
pub fn metric_inverse(g: &TensorJet) -> Result<TensorJet, GeoError> {
    expect_valence(g, 0, 2)?;
    let n = g.dim();
    let vars = g.chart().vars();
    let order = g.order();
    let mut a: Vec<Vec<Jet>> = (0..n).map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect()).collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Jet::one(vars, order) } else { Jet::zero(vars, order) }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].eval0().is_zero()).ok_or(GeoError::DegenerateMetric)?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].invert()?;
        for j in 0..n {
            a[c][j] = &a[c][j] * &piv;
            inv[c][j] = &inv[c][j] * &piv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                if !a[c][j].is_zero() {
                    a[r][j] = &a[r][j] - &(&f * &a[c][j]);
                }
                if !inv[c][j].is_zero() {
                    inv[r][j] = &inv[r][j] - &(&f * &inv[c][j]);
                }
            }
        }
    }
    // Symmetrize the storage: both triangles agree up to truncation, keep the upper one.
    let out = TensorJet::from_fn(g.chart(), 2, 0, |i| {
        let (r, c) = if i[0] <= i[1] { (i[0], i[1]) } else { (i[1], i[0]) };
        inv[r][c].clone()
    });
    Ok(out.with_symmetry(Symmetry::Symmetric(0, 1)))
}

/// Levi-Civita connection `Γ^k_ij`, stored symmetric in the lower pair.
pub fn christoffel(g: &TensorJet, ginv: &TensorJet) -> Result<TensorJet, GeoError> {
    expect_valence(g, 0, 2)?;
    expect_valence(ginv, 2, 0)?;
    if g.chart() != ginv.chart() {
        return Err(GeoError::ChartMismatch);
    }
    let n = g.dim();
    let vars = g.chart().vars();
    // dg[c][a][b] = ∂_c g_ab
    let mut dg = Vec::with_capacity(n);
    for c in 0..n {
        let mut rows = Vec::with_capacity(n);
        for a in 0..n {
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                row.push(g.get(&[a, b]).partial(c)?);
            }
            rows.push(row);
        }
        dg.push(rows);
    }
    let half = Rational::new(1, 2);
    let mut low = vec![Jet::zero(vars, 0); n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = (&(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j]).scale(&half);
                low[(l * n + i) * n + j] = v.clone();
                low[(l * n + j) * n + i] = v;
            }
        }
    }
    let mut gamma = TensorJet::zeros(g.chart(), 1, 2, 0);
    gamma.symmetries.push(Symmetry::Symmetric(1, 2));
    let order = g.order();
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = dot(vars, order, (0..n).map(|l| (ginv.get(&[k, l]), &low[(l * n + i) * n + j])));
                gamma.set(&[k, i, j], v);
            }
        }
    }
    Ok(gamma)
}

/// Curvature `R^l_kij` with `R(∂_i,∂_j)∂_k = ∇_i∇_j∂_k − ∇_j∇_i∂_k`,
/// stored antisymmetric in the last pair.
pub fn riemann(gamma: &TensorJet) -> Result<TensorJet, GeoError> {
    expect_valence(gamma, 1, 2)?;
    let n = gamma.dim();
    let vars = gamma.chart().vars();
    let order = gamma.order();
    // dgam[i][l][j][k] = ∂_i Γ^l_jk
    let mut dgam = Vec::with_capacity(n);
    for i in 0..n {
        dgam.push(gamma.components().iter().map(|j| j.partial(i)).collect::<Result<Vec<_>, _>>()?);
    }
    let at = |l: usize, j: usize, k: usize| (l * n + j) * n + k;
    let mut r = TensorJet::zeros(gamma.chart(), 1, 3, 0);
    r.symmetries.push(Symmetry::Antisymmetric(2, 3));
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    let mut v = &dgam[i][at(l, j, k)] - &dgam[j][at(l, i, k)];
                    let quad = dot(vars, order, (0..n).map(|m| (gamma.get(&[l, i, m]), gamma.get(&[m, j, k]))));
                    let quad2 = dot(vars, order, (0..n).map(|m| (gamma.get(&[l, j, m]), gamma.get(&[m, i, k]))));
                    v = &(&v + &quad) - &quad2;
                    r.set(&[l, k, i, j], v);
                }
            }
        }
    }
    fill_untouched(&mut r, |idx| idx[2] == idx[3]);
    Ok(r)
}

/// Resets the components picked by `skip` to zero at the smallest order of
/// the remaining ones, so the tensor's order reflects what was computed.
fn fill_untouched(t: &mut TensorJet, skip: impl Fn(&[usize]) -> bool) {
    let order = t.indexed().filter(|(idx, _)| !skip(idx)).map(|(_, j)| j.order()).min().unwrap_or(0);
    let vars = t.chart().vars();
    let n = t.dim();
    let r = t.rank();
    for f in 0..t.comps.len() {
        if skip(&super::unflatten(f, n, r)) {
            t.comps[f] = Jet::zero(vars, order);
        }
    }
}

/// `Ric_kj = R^i_kij`.
pub fn ricci(r: &TensorJet) -> Result<TensorJet, GeoError> {
    expect_valence(r, 1, 3)?;
    let n = r.dim();
    let vars = r.chart().vars();
    let order = r.order();
    let ric = TensorJet::from_fn(r.chart(), 0, 2, |idx| {
        let (k, j) = (idx[0], idx[1]);
        (0..n).fold(Jet::zero(vars, order), |acc, i| &acc + r.get(&[i, k, i, j]))
    });
    Ok(ric)
}

/// Ricci tensor straight from the connection, computing only the
/// components selected by `which`; the rest are left zero.
pub fn ricci_direct(gamma: &TensorJet, which: &dyn Fn(usize, usize) -> bool) -> Result<TensorJet, GeoError> {
    expect_valence(gamma, 1, 2)?;
    let n = gamma.dim();
    let vars = gamma.chart().vars();
    let order = gamma.order();
    // trace vector Γ^i_im
    let tr: Vec<Jet> =
        (0..n).map(|m| (0..n).fold(Jet::zero(vars, order), |acc, i| &acc + gamma.get(&[i, i, m]))).collect();
    let mut ric = TensorJet::zeros(gamma.chart(), 0, 2, 0);
    let selected = |k: usize, j: usize| which(k, j) || which(j, k);
    for k in 0..n {
        for j in k..n {
            if !selected(k, j) {
                continue;
            }
            let mut v = tr[k].partial(j)?.scale(&Rational::from_integer(-1));
            for i in 0..n {
                v = &v + &gamma.get(&[i, j, k]).partial(i)?;
            }
            v = &v + &dot(vars, order, (0..n).map(|m| (&tr[m], gamma.get(&[m, j, k]))));
            for i in 0..n {
                for m in 0..n {
                    let (a, b) = (gamma.get(&[i, j, m]), gamma.get(&[m, i, k]));
                    if !a.is_zero() && !b.is_zero() {
                        v = &v - &(a * b);
                    }
                }
            }
            ric.comps[k * n + j] = v.clone();
            ric.comps[j * n + k] = v;
        }
    }
    fill_untouched(&mut ric, |idx| !selected(idx[0], idx[1]));
    Ok(ric)
}

pub fn scalar_curvature(ginv: &TensorJet, ric: &TensorJet) -> Result<Jet, GeoError> {
    expect_valence(ginv, 2, 0)?;
    expect_valence(ric, 0, 2)?;
    let n = ginv.dim();
    let vars = ginv.chart().vars();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    Ok(dot(vars, ric.order(), pairs.iter().map(|&(i, j)| (ginv.get(&[i, j]), ric.get(&[i, j])))))
}

/// Schouten tensor `P = (Ric − J g)/(n − 2)` and its trace `J = Scal/(2(n − 1))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchoutenData {
    pub p: TensorJet,
    pub j: Jet,
}

pub fn schouten(g: &TensorJet, ginv: &TensorJet) -> Result<SchoutenData, GeoError> {
    let n = g.dim();
    if n < 3 {
        return Err(GeoError::DimensionTooSmall(n));
    }
    let gamma = christoffel(g, ginv)?;
    let ric = ricci_direct(&gamma, &|_, _| true)?;
    let scal = scalar_curvature(ginv, &ric)?;
    let nq = n as i64;
    let j = scal.scale(&Rational::new(1, 2 * (nq - 1)));
    let inv = Rational::new(1, nq - 2);
    let p = TensorJet::from_fn(g.chart(), 0, 2, |i| (ric.get(i) - &(&j * g.get(i))).scale(&inv))
        .with_symmetry(Symmetry::Symmetric(0, 1));
    Ok(SchoutenData { p, j })
}

/// Weyl tensor `W_lkij`, from `R_lkij = g_lm R^m_kij` minus the Schouten part.
pub fn weyl(g: &TensorJet, r: &TensorJet, p: &TensorJet) -> Result<TensorJet, GeoError> {
    expect_valence(g, 0, 2)?;
    expect_valence(r, 1, 3)?;
    expect_valence(p, 0, 2)?;
    let n = g.dim();
    let vars = g.chart().vars();
    let order = r.order();
    Ok(TensorJet::from_fn(g.chart(), 0, 4, |idx| {
        let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
        let rl = dot(vars, order, (0..n).map(|m| (g.get(&[l, m]), r.get(&[m, k, i, j]))));
        let kul = &(&(g.get(&[l, i]) * p.get(&[k, j])) + &(p.get(&[l, i]) * g.get(&[k, j])))
            - &(&(g.get(&[l, j]) * p.get(&[k, i])) + &(p.get(&[l, j]) * g.get(&[k, i])));
        &rl - &kul
    }))
}

/// Cotton tensor `C_jki = ∇_i P_jk − ∇_k P_ji`.
pub fn cotton(p: &TensorJet, gamma: &TensorJet) -> Result<TensorJet, GeoError> {
    let dp = super::covariant_derivative(p, gamma)?;
    Ok(TensorJet::from_fn(p.chart(), 0, 3, |idx| {
        let (j, k, i) = (idx[0], idx[1], idx[2]);
        dp.get(&[j, k, i]) - dp.get(&[j, i, k])
    }))
}

/// Bach tensor `B_li = ∇^k∇_k P_li − ∇^k∇_l P_ik + P^kj W_lkij`.
pub fn bach(ginv: &TensorJet, gamma: &TensorJet, p: &TensorJet, w: &TensorJet) -> Result<TensorJet, GeoError> {
    let n = ginv.dim();
    let vars = ginv.chart().vars();
    let dp = super::covariant_derivative(p, gamma)?;
    let ddp = super::covariant_derivative(&dp, gamma)?; // ∇_d ∇_c P_ab at [a, b, c, d]
    let order = ddp.order().min(w.order());
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let pup = TensorJet::from_fn(p.chart(), 2, 0, |idx| {
        let mut acc = Jet::zero(vars, p.order());
        for &(a, b) in &pairs {
            let x = ginv.get(&[idx[0], a]);
            let y = ginv.get(&[idx[1], b]);
            let z = p.get(&[a, b]);
            if !x.is_zero() && !y.is_zero() && !z.is_zero() {
                acc = &acc + &(&(x * y) * z);
            }
        }
        acc
    });
    let b = TensorJet::from_fn(p.chart(), 0, 2, |idx| {
        let (l, i) = (idx[0], idx[1]);
        let lap = dot(vars, order, pairs.iter().map(|&(k, d)| (ginv.get(&[k, d]), ddp.get(&[l, i, k, d]))));
        let mixed = dot(vars, order, pairs.iter().map(|&(k, d)| (ginv.get(&[k, d]), ddp.get(&[i, k, l, d]))));
        let wterm = dot(vars, order, pairs.iter().map(|&(k, j)| (pup.get(&[k, j]), w.get(&[l, k, i, j]))));
        &(&lap - &mixed) + &wterm
    });
    Ok(b)
}
