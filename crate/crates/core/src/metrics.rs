//! Metric jets used as inputs: flat, round sphere, an Einstein product and
//! seeded random perturbations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jetcalc::{factorial, Jet, MultiIndex, Rational, Vars};
use crate::linalg::Matrix;
use crate::tensorgeo::{Chart, TensorJet};

/// Diagonal `±1` matrix with `p` plus signs followed by `q` minus signs.
pub fn signature_matrix(p: usize, q: usize) -> Matrix {
    Matrix::from_fn(p + q, p + q, |i, j| match (i == j, i < p) {
        (false, _) => Rational::zero(),
        (true, true) => Rational::one(),
        (true, false) => Rational::from_integer(-1),
    })
}

pub fn flat(p: usize, q: usize, order: u32) -> TensorJet {
    TensorJet::constant_2form(&Chart::standard(p + q), &signature_matrix(p, q), order)
}

/// `cos² x_var = 1 + Σ_{k≥1} (−1)^k 2^(2k−1) x^(2k) / (2k)!`.
pub fn cos_sq(var: usize, vars: Vars, order: u32) -> Jet {
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

fn diagonal(chart: &Chart, diag: Vec<Jet>) -> TensorJet {
    let vars = chart.vars();
    let order = diag.iter().map(Jet::order).min().unwrap_or(0);
    TensorJet::from_fn(chart, 0, 2, |i| if i[0] == i[1] { diag[i[0]].clone() } else { Jet::zero(vars, order) })
}

/// Unit round sphere `dx1² + cos²x1 (dx2² + cos²x2 (dx3² + …))`.
pub fn sphere(n: usize, order: u32) -> TensorJet {
    let chart = Chart::standard(n);
    let vars = chart.vars();
    let mut diag = vec![Jet::one(vars, order)];
    for i in 1..n {
        let prev = diag[i - 1].clone();
        diag.push(&prev * &cos_sq(i - 1, vars, order));
    }
    diagonal(&chart, diag)
}

/// `S² × S²` with unit radii, `dx1² + cos²x1 dx2² + dx3² + cos²x3 dx4²`.
pub fn einstein_product(order: u32) -> TensorJet {
    let chart = Chart::standard(4);
    let vars = chart.vars();
    let one = Jet::one(vars, order);
    diagonal(&chart, vec![one.clone(), cos_sq(0, vars, order), one, cos_sq(2, vars, order)])
}

/// `diag(±1)` plus a symmetric polynomial perturbation vanishing at the
/// origin. Entries are sums of a few monomials of degree 1 to 3 with small
/// rational coefficients, drawn from a ChaCha stream seeded by `seed`.
pub fn random_rational(p: usize, q: usize, order: u32, seed: u64) -> TensorJet {
    random_rational_bounded(p, q, order, seed, 3)
}

/// As [`random_rational`], with numerators in `[-magnitude, magnitude]` and
/// denominators in `[1, magnitude]`.
pub fn random_rational_bounded(p: usize, q: usize, order: u32, seed: u64, magnitude: u32) -> TensorJet {
    let n = p + q;
    let mag = magnitude.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = Chart::standard(n);
    let vars = chart.vars();
    let base = signature_matrix(p, q);
    let mut entries = vec![vec![Jet::zero(vars, order); n]; n];
    for i in 0..n {
        for j in i..n {
            let terms: Vec<(MultiIndex, Rational)> = (0..4)
                .filter_map(|_| {
                    let deg = rng.gen_range(1..=3u32);
                    let mut e = vec![0u32; n];
                    for _ in 0..deg {
                        e[rng.gen_range(0..n)] += 1;
                    }
                    let num = rng.gen_range(-mag..=mag);
                    let den = rng.gen_range(1..=mag);
                    (num != 0 && deg <= order).then(|| (MultiIndex::from_exponents(&e), Rational::new(num, den)))
                })
                .collect();
            let e = &Jet::from_terms(vars, order, terms) + &Jet::constant(base[(i, j)].clone(), vars, order);
            entries[i][j] = e.clone();
            entries[j][i] = e;
        }
    }
    TensorJet::from_fn(&chart, 0, 2, |i| entries[i[0]][i[1]].clone())
}
