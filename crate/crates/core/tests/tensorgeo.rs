use ambient_core::jetcalc::{factorial, Jet, MultiIndex, Rational, Vars};
use ambient_core::linalg::Matrix;
use ambient_core::tensorgeo::{
    bach, christoffel, covariant_derivative, metric_inverse, ricci, ricci_direct, riemann, schouten, weyl, Chart,
    GeoError, TensorJet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// cos^2(x_var) = 1 + sum_{k>=1} (-1)^k 2^(2k-1) x^(2k) / (2k)!
fn cos_sq(var: usize, vars: Vars, order: u32) -> Jet {
    let mut terms = vec![(MultiIndex::ZERO, Rational::one())];
    let mut k = 1;
    while 2 * k <= order {
        let mut e = vec![0; vars.nvars()];
        e[var] = 2 * k;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = &Rational::from_integer(sign * (1i64 << (2 * k - 1))) / &factorial(2 * k);
        terms.push((MultiIndex::from_exponents(&e), c));
        k += 1;
    }
    Jet::from_terms(vars, order, terms)
}

/// Unit round sphere: dx1^2 + cos^2 x1 (dx2^2 + cos^2 x2 (dx3^2 + ...)).
fn sphere(n: usize, order: u32) -> TensorJet {
    let chart = Chart::standard(n);
    let vars = chart.vars();
    let mut diag = vec![Jet::one(vars, order)];
    for i in 1..n {
        let prev = diag[i - 1].clone();
        diag.push(&prev * &cos_sq(i - 1, vars, order));
    }
    TensorJet::from_fn(&chart, 0, 2, |i| if i[0] == i[1] { diag[i[0]].clone() } else { Jet::zero(vars, order) })
}

fn einstein_product(order: u32) -> TensorJet {
    let chart = Chart::standard(4);
    let vars = chart.vars();
    let diag = [Jet::one(vars, order), cos_sq(0, vars, order), Jet::one(vars, order), cos_sq(2, vars, order)];
    TensorJet::from_fn(&chart, 0, 2, |i| if i[0] == i[1] { diag[i[0]].clone() } else { Jet::zero(vars, order) })
}

fn random_jet(rng: &mut ChaCha8Rng, vars: Vars, order: u32, min_deg: u32, count: usize) -> Jet {
    let terms = (0..count).filter_map(|_| {
        let e: Vec<u32> = (0..vars.nvars()).map(|_| rng.gen_range(0..=2)).collect();
        let m = MultiIndex::from_exponents(&e);
        let deg = vars.degree(m);
        (deg >= min_deg && deg <= order).then(|| (m, r(rng.gen_range(-3..=3), rng.gen_range(1..=3))))
    });
    Jet::from_terms(vars, order, terms)
}

fn random_metric(seed: u64, n: usize, order: u32) -> TensorJet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = Chart::standard(n);
    let vars = chart.vars();
    let mut entries = vec![vec![Jet::zero(vars, order); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut e = random_jet(&mut rng, vars, order, 1, 4);
            if i == j {
                e = &e + &Jet::one(vars, order);
            }
            entries[i][j] = e.clone();
            entries[j][i] = e;
        }
    }
    TensorJet::from_fn(&chart, 0, 2, |i| entries[i[0]][i[1]].clone())
}

fn all_zero(t: &TensorJet) -> bool {
    t.is_zero()
}

#[test]
fn inverse_of_identity_and_diagonal() {
    let chart = Chart::standard(2);
    let vars = chart.vars();
    let id = TensorJet::constant_2form(&chart, &Matrix::identity(2), 3);
    let inv = metric_inverse(&id).unwrap();
    assert_eq!(inv.eval0_matrix(), Matrix::identity(2));
    assert!(inv.components().iter().all(|j| j.num_terms() <= 1));

    let x = Jet::var(0, vars, 2);
    let g = TensorJet::from_fn(&chart, 0, 2, |i| match (i[0], i[1]) {
        (0, 0) => &Jet::one(vars, 2) + &x,
        (1, 1) => Jet::one(vars, 2),
        _ => Jet::zero(vars, 2),
    });
    let inv = metric_inverse(&g).unwrap();
    assert_eq!(inv.get(&[0, 0]).to_poly_string(&["x", "y"]), "1 - x + x^2");
}

#[test]
fn inverse_contracts_to_delta() {
    for seed in 0..4 {
        let g = random_metric(seed, 3, 4);
        let inv = metric_inverse(&g).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let mut s = Jet::zero(g.chart().vars(), 4);
                for c in 0..3 {
                    s = &s + &(inv.get(&[a, c]) * g.get(&[c, b]));
                }
                let delta = if a == b { Rational::one() } else { Rational::zero() };
                assert_eq!(s, Jet::constant(delta, g.chart().vars(), 4));
            }
        }
    }
}

#[test]
fn degenerate_metric_is_rejected() {
    let chart = Chart::standard(2);
    let m = Matrix::from_rows(vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]]);
    let g = TensorJet::constant_2form(&chart, &m, 2);
    assert_eq!(metric_inverse(&g), Err(GeoError::DegenerateMetric));
}

#[test]
fn split_signature_inverse() {
    let chart = Chart::standard(3);
    let m = Matrix::from_rows(vec![
        vec![r(0, 1), r(1, 1), r(0, 1)],
        vec![r(1, 1), r(0, 1), r(0, 1)],
        vec![r(0, 1), r(0, 1), r(1, 1)],
    ]);
    let g = TensorJet::constant_2form(&chart, &m, 2);
    assert_eq!(metric_inverse(&g).unwrap().eval0_matrix(), m);
}

#[test]
fn flat_metric_has_no_connection_or_curvature() {
    let chart = Chart::standard(3);
    let g = TensorJet::constant_2form(&chart, &Matrix::identity(3), 4);
    let gi = metric_inverse(&g).unwrap();
    let gam = christoffel(&g, &gi).unwrap();
    assert!(all_zero(&gam));
    assert!(all_zero(&riemann(&gam).unwrap()));
    assert!(all_zero(&ricci(&riemann(&gam).unwrap()).unwrap()));
    let s = schouten(&g, &gi).unwrap();
    assert!(s.p.is_zero() && s.j.is_zero());
}

#[test]
fn conformal_plane_christoffel() {
    // g = e^{2x} (dx^2 + dy^2): Γ^x_xx = ∂_x(x) = 1.
    let chart = Chart::standard(2);
    let vars = chart.vars();
    let order = 4;
    let e2x = Jet::from_terms(
        vars,
        order,
        (0..=order).map(|k| {
            let c = &Rational::from_integer(1 << k) / &factorial(k);
            (MultiIndex::from_exponents(&[k, 0]), c)
        }),
    );
    let g = TensorJet::from_fn(&chart, 0, 2, |i| if i[0] == i[1] { e2x.clone() } else { Jet::zero(vars, order) });
    let gam = christoffel(&g, &metric_inverse(&g).unwrap()).unwrap();
    assert_eq!(gam.get(&[0, 0, 0]).eval0(), Rational::one());
    assert_eq!(gam.get(&[1, 0, 1]).eval0(), Rational::one());
    assert_eq!(gam.get(&[0, 1, 1]).eval0(), Rational::from_integer(-1));
}

#[test]
fn metric_is_parallel() {
    for seed in 0..3 {
        let g = random_metric(seed, 3, 4);
        let gam = christoffel(&g, &metric_inverse(&g).unwrap()).unwrap();
        assert!(covariant_derivative(&g, &gam).unwrap().is_zero());
    }
    let g = sphere(3, 5);
    let gam = christoffel(&g, &metric_inverse(&g).unwrap()).unwrap();
    assert!(covariant_derivative(&g, &gam).unwrap().is_zero());
}

#[test]
fn two_sphere_gauss_curvature() {
    let g = sphere(2, 4);
    let gam = christoffel(&g, &metric_inverse(&g).unwrap()).unwrap();
    let riem = riemann(&gam).unwrap();
    // R_0101 = g_0m R^m_101
    let r0101 =
        (0..2).fold(Jet::zero(g.chart().vars(), 2), |acc, m| &acc + &(g.get(&[0, m]) * riem.get(&[m, 1, 0, 1])));
    let det = &(g.get(&[0, 0]) * g.get(&[1, 1])) - &(g.get(&[0, 1]) * g.get(&[1, 0]));
    assert_eq!(&r0101.eval0() / &det.eval0(), Rational::one());
    // constant curvature holds as a jet identity: R_0101 = det g
    assert!((&r0101 - &det).is_zero());
}

#[test]
fn three_sphere_ricci_and_schouten() {
    let g = sphere(3, 5);
    let gi = metric_inverse(&g).unwrap();
    let gam = christoffel(&g, &gi).unwrap();
    let ric = ricci(&riemann(&gam).unwrap()).unwrap();
    for (idx, j) in ric.indexed() {
        assert!((j - &g.get(&idx).scale(&r(2, 1))).is_zero(), "Ric != 2g at {idx:?}");
    }
    let s = schouten(&g, &gi).unwrap();
    assert_eq!(s.j.eval0(), r(3, 2));
    for (idx, p) in s.p.indexed() {
        assert!((p - &g.get(&idx).scale(&r(1, 2))).is_zero());
    }
}

#[test]
fn curvature_identities_on_random_metrics() {
    for seed in 10..13 {
        let g = random_metric(seed, 3, 5);
        let gi = metric_inverse(&g).unwrap();
        let gam = christoffel(&g, &gi).unwrap();
        let riem = riemann(&gam).unwrap();
        assert!(riem.check_symmetries());
        let n = 3;
        // first Bianchi identity
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = &(riem.get(&[l, k, i, j]) + riem.get(&[l, i, j, k])) + riem.get(&[l, j, k, i]);
                        assert!(s.is_zero());
                    }
                }
            }
        }
        // pair symmetry of the lowered tensor
        let low = TensorJet::from_fn(g.chart(), 0, 4, |x| {
            (0..n).fold(Jet::zero(g.chart().vars(), 5), |acc, m| {
                &acc + &(g.get(&[x[0], m]) * riem.get(&[m, x[1], x[2], x[3]]))
            })
        });
        for (x, v) in low.indexed() {
            assert!((v - low.get(&[x[2], x[3], x[0], x[1]])).is_zero());
            assert!((v + low.get(&[x[1], x[0], x[2], x[3]])).is_zero());
        }
        // contraction and direct Ricci agree, and Ric is symmetric
        let ric = ricci(&riem).unwrap();
        let direct = ricci_direct(&gam, &|_, _| true).unwrap();
        for (x, v) in ric.indexed() {
            assert!((v - direct.get(&x)).is_zero());
            assert!((v - ric.get(&[x[1], x[0]])).is_zero());
        }
        // second Bianchi identity
        let dr = covariant_derivative(&riem, &gam).unwrap();
        for l in 0..n {
            for k in 0..n {
                for a in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let s = &(dr.get(&[l, k, i, j, a]) + dr.get(&[l, k, j, a, i])) + dr.get(&[l, k, a, i, j]);
                            assert!(s.is_zero());
                        }
                    }
                }
            }
        }
        // trace identity of the Schouten tensor
        let sd = schouten(&g, &gi).unwrap();
        let mut tr = Jet::zero(g.chart().vars(), 5);
        for i in 0..n {
            for j in 0..n {
                tr = &tr + &(gi.get(&[i, j]) * sd.p.get(&[i, j]));
            }
        }
        assert!((&tr - &sd.j).is_zero());
    }
}

#[test]
fn weyl_and_bach_vanish_where_expected() {
    let g = sphere(4, 6);
    let gi = metric_inverse(&g).unwrap();
    let gam = christoffel(&g, &gi).unwrap();
    let riem = riemann(&gam).unwrap();
    let sd = schouten(&g, &gi).unwrap();
    let w = weyl(&g, &riem, &sd.p).unwrap();
    assert!(w.is_zero());
    assert!(bach(&gi, &gam, &sd.p, &w).unwrap().is_zero());

    let g = einstein_product(6);
    let gi = metric_inverse(&g).unwrap();
    let gam = christoffel(&g, &gi).unwrap();
    let riem = riemann(&gam).unwrap();
    let sd = schouten(&g, &gi).unwrap();
    let w = weyl(&g, &riem, &sd.p).unwrap();
    assert!(!w.is_zero());
    assert!(bach(&gi, &gam, &sd.p, &w).unwrap().is_zero());

    let g = random_metric(3, 4, 6);
    let gi = metric_inverse(&g).unwrap();
    let gam = christoffel(&g, &gi).unwrap();
    let riem = riemann(&gam).unwrap();
    let sd = schouten(&g, &gi).unwrap();
    let w = weyl(&g, &riem, &sd.p).unwrap();
    // Weyl is trace-free
    for k in 0..4 {
        for j in 0..4 {
            let mut s = Jet::zero(g.chart().vars(), 6);
            for l in 0..4 {
                for i in 0..4 {
                    s = &s + &(gi.get(&[l, i]) * w.get(&[l, k, i, j]));
                }
            }
            assert!(s.is_zero());
        }
    }
    assert!(!bach(&gi, &gam, &sd.p, &w).unwrap().is_zero());
}

#[test]
fn scalar_gradient_and_order_budget() {
    let chart = Chart::standard(2);
    let vars = chart.vars();
    let g = TensorJet::constant_2form(&chart, &Matrix::identity(2), 3);
    let gam = christoffel(&g, &metric_inverse(&g).unwrap()).unwrap();
    let f = Jet::from_terms(vars, 3, [(MultiIndex::from_exponents(&[2, 1]), r(1, 1))]);
    let df = covariant_derivative(&TensorJet::scalar(&chart, f.clone()), &gam).unwrap();
    assert_eq!(df.get(&[0]), &f.partial(0).unwrap());
    assert_eq!(df.get(&[1]), &f.partial(1).unwrap());

    let flat0 = TensorJet::scalar(&chart, Jet::one(vars, 0));
    let gam0 = gam.truncate(0);
    assert!(matches!(covariant_derivative(&flat0, &gam0), Err(GeoError::OrderExhausted { .. })));
}

fn random_field(seed: u64, chart: &Chart, upper: usize, lower: usize, order: u32) -> TensorJet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TensorJet::from_fn(chart, upper, lower, |_| random_jet(&mut rng, chart.vars(), order, 0, 5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ricci_commutation(seed in 0u64..1000) {
        let g = random_metric(seed, 3, 5);
        let gam = christoffel(&g, &metric_inverse(&g).unwrap()).unwrap();
        let riem = riemann(&gam).unwrap();
        let n = 3;
        // vector field: (∇_i∇_j − ∇_j∇_i) V^l = R^l_kij V^k
        let v = random_field(seed + 1, g.chart(), 1, 0, 5);
        let ddv = covariant_derivative(&covariant_derivative(&v, &gam).unwrap(), &gam).unwrap();
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let lhs = ddv.get(&[l, j, i]) - ddv.get(&[l, i, j]);
                    let rhs = (0..n).fold(Jet::zero(g.chart().vars(), 5), |acc, k| &acc + &(riem.get(&[l, k, i, j]) * v.get(&[k])));
                    prop_assert!((&lhs - &rhs).is_zero());
                }
            }
        }
        // (1,2) field: each index picks up its curvature term
        let t = random_field(seed + 2, g.chart(), 1, 2, 4);
        let ddt = covariant_derivative(&covariant_derivative(&t, &gam).unwrap(), &gam).unwrap();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let lhs = ddt.get(&[a, b, c, j, i]) - ddt.get(&[a, b, c, i, j]);
                            let mut rhs = Jet::zero(g.chart().vars(), 4);
                            for k in 0..n {
                                rhs = &rhs + &(riem.get(&[a, k, i, j]) * t.get(&[k, b, c]));
                                rhs = &rhs - &(riem.get(&[k, b, i, j]) * t.get(&[a, k, c]));
                                rhs = &rhs - &(riem.get(&[k, c, i, j]) * t.get(&[a, b, k]));
                            }
                            prop_assert!((&lhs - &rhs).is_zero());
                        }
                    }
                }
            }
        }
    }
}
