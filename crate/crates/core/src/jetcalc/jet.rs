use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use super::rational::Rational;
use super::JetError;

/// Maximum number of jet variables; exponents are packed one byte each.
pub const MAX_VARS: usize = 8;

const UNCAPPED: u8 = u8::MAX;

/// Variable count plus the degree weight of each variable.
///
/// Truncation is on the weighted degree `sum(weight_i * alpha_i)`. With all
/// weights equal to one this is the ordinary total degree.
///
/// A variable may also carry an exponent cap: monomials exceeding it are
/// dropped, i.e. arithmetic is modulo `x_i^(cap+1)` as well. That quotient
/// is not closed under `∂/∂x_i`: after differentiating, the coefficient at
/// the cap is no longer reliable, and it is up to the caller to read only
/// exponents that stay far enough below the cap.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Vars {
    n: u8,
    weights: [u8; MAX_VARS],
    caps: [u8; MAX_VARS],
}

impl Vars {
    pub fn uniform(n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} jet variables");
        let mut weights = [0u8; MAX_VARS];
        weights[..n].fill(1);
        Vars { n: n as u8, weights, caps: [UNCAPPED; MAX_VARS] }
    }

    pub fn weighted(weights: &[u8]) -> Self {
        assert!(weights.len() <= MAX_VARS, "at most {MAX_VARS} jet variables");
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        let mut w = [0u8; MAX_VARS];
        w[..weights.len()].copy_from_slice(weights);
        Vars { n: weights.len() as u8, weights: w, caps: [UNCAPPED; MAX_VARS] }
    }

    /// Same grading with exponents of `var` capped at `cap`.
    pub fn with_cap(mut self, var: usize, cap: u32) -> Self {
        assert!(var < self.nvars());
        assert!(cap < UNCAPPED as u32, "cap too large");
        self.caps[var] = cap as u8;
        self
    }

    pub fn cap(&self, var: usize) -> Option<u32> {
        (self.caps[var] != UNCAPPED).then_some(self.caps[var] as u32)
    }

    pub fn is_capped(&self) -> bool {
        self.caps[..self.nvars()].iter().any(|&c| c != UNCAPPED)
    }

    /// Whether `m` survives the exponent caps.
    #[inline]
    pub fn admits(&self, m: MultiIndex) -> bool {
        self.caps[..self.nvars()].iter().enumerate().all(|(i, &c)| c == UNCAPPED || m.exponent(i) <= c as u32)
    }

    pub fn nvars(&self) -> usize {
        self.n as usize
    }

    pub fn weight(&self, var: usize) -> u32 {
        self.weights[var] as u32
    }

    pub fn is_uniform(&self) -> bool {
        self.weights[..self.nvars()].iter().all(|&w| w == 1)
    }

    pub fn degree(&self, m: MultiIndex) -> u32 {
        (0..self.nvars()).map(|i| m.exponent(i) * self.weight(i)).sum()
    }
}

/// Exponent vector, packed one byte per variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex(0);

    pub fn unit(var: usize) -> Self {
        MultiIndex(1u64 << (8 * var))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut packed = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < 256, "exponent overflow");
            packed |= (e as u64) << (8 * i);
        }
        MultiIndex(packed)
    }

    pub fn exponent(self, var: usize) -> u32 {
        ((self.0 >> (8 * var)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn total_degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i)).sum()
    }

    /// Componentwise sum; exponents stay far below 256 at any usable order.
    #[inline]
    pub fn plus(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 + other.0)
    }

    fn lower(self, var: usize) -> MultiIndex {
        MultiIndex(self.0 - (1u64 << (8 * var)))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Term {
    deg: u32,
    mono: MultiIndex,
    coeff: Rational,
}

fn term_key(t: &Term) -> (u32, MultiIndex) {
    (t.deg, t.mono)
}

/// A truncated multivariate Taylor series with exact rational coefficients.
///
/// Every stored monomial has weighted degree `<= order`, and coefficients
/// are never stored as zero. Binary operations truncate to the smaller of
/// the two orders.
#[derive(Clone, PartialEq, Eq)]
pub struct Jet {
    vars: Vars,
    order: u32,
    terms: Vec<Term>,
}

impl Jet {
    pub fn zero(vars: Vars, order: u32) -> Self {
        Jet { vars, order, terms: Vec::new() }
    }

    pub fn constant(c: Rational, vars: Vars, order: u32) -> Self {
        Self::monomial(MultiIndex::ZERO, c, vars, order)
    }

    pub fn one(vars: Vars, order: u32) -> Self {
        Self::constant(Rational::one(), vars, order)
    }

    /// The coordinate function of variable `var`.
    pub fn var(var: usize, vars: Vars, order: u32) -> Self {
        assert!(var < vars.nvars());
        Self::monomial(MultiIndex::unit(var), Rational::one(), vars, order)
    }

    pub fn monomial(mono: MultiIndex, c: Rational, vars: Vars, order: u32) -> Self {
        let deg = vars.degree(mono);
        let terms = if c.is_zero() || deg > order || !vars.admits(mono) {
            Vec::new()
        } else {
            vec![Term { deg, mono, coeff: c }]
        };
        Jet { vars, order, terms }
    }

    /// Builds a jet from (monomial, coefficient) pairs; repeated monomials
    /// are summed and anything above `order` is dropped.
    pub fn from_terms<I>(vars: Vars, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut acc: FxHashMap<MultiIndex, Rational> = FxHashMap::default();
        for (m, c) in terms {
            if vars.degree(m) <= order && vars.admits(m) {
                *acc.entry(m).or_default() += &c;
            }
        }
        Self::from_map(vars, order, acc)
    }

    fn from_map(vars: Vars, order: u32, acc: FxHashMap<MultiIndex, Rational>) -> Self {
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, coeff)| Term { deg: vars.degree(mono), mono, coeff })
            .collect();
        terms.sort_by_key(term_key);
        Jet { vars, order, terms }
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.nvars()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Nonzero (monomial, coefficient) pairs in (degree, monomial) order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &Rational)> + '_ {
        self.terms.iter().map(|t| (t.mono, &t.coeff))
    }

    pub fn coeff(&self, mono: MultiIndex) -> Rational {
        let key = (self.vars.degree(mono), mono);
        match self.terms.binary_search_by(|t| term_key(t).cmp(&key)) {
            Ok(i) => self.terms[i].coeff.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Value at the base point.
    pub fn eval0(&self) -> Rational {
        match self.terms.first() {
            Some(t) if t.deg == 0 => t.coeff.clone(),
            _ => Rational::zero(),
        }
    }

    /// Drops everything above `order` (no-op when `order >= self.order`).
    pub fn truncate(&self, order: u32) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let terms = self.terms.iter().take_while(|t| t.deg <= order).cloned().collect();
        Jet { vars: self.vars, order, terms }
    }

    /// Same series with a different claimed order; terms above it are dropped.
    pub fn with_order(&self, order: u32) -> Jet {
        let mut j = self.truncate(order);
        j.order = order;
        j
    }

    fn check_vars(&self, other: &Jet) -> Result<(), JetError> {
        if self.vars != other.vars {
            return Err(JetError::VarMismatch { left: self.vars.nvars(), right: other.vars.nvars() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_vars(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_vars(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Jet, negate: bool) -> Jet {
        let order = self.order.min(other.order);
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().take_while(|t| t.deg <= order).peekable();
        let mut b = other.terms.iter().take_while(|t| t.deg <= order).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => terms.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let t = b.next().unwrap();
                    let coeff = if negate { -&t.coeff } else { t.coeff.clone() };
                    terms.push(Term { deg: t.deg, mono: t.mono, coeff });
                }
                (Some(x), Some(y)) => match term_key(x).cmp(&term_key(y)) {
                    Ordering::Less => terms.push(a.next().unwrap().clone()),
                    Ordering::Greater => {
                        let t = b.next().unwrap();
                        let coeff = if negate { -&t.coeff } else { t.coeff.clone() };
                        terms.push(Term { deg: t.deg, mono: t.mono, coeff });
                    }
                    Ordering::Equal => {
                        let x = a.next().unwrap();
                        let y = b.next().unwrap();
                        let c = if negate { &x.coeff - &y.coeff } else { &x.coeff + &y.coeff };
                        if !c.is_zero() {
                            terms.push(Term { deg: x.deg, mono: x.mono, coeff: c });
                        }
                    }
                },
            }
        }
        Jet { vars: self.vars, order, terms }
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_vars(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        if self.is_zero() || other.is_zero() {
            return Jet::zero(self.vars, order);
        }
        // Constant factors are common (metric entries, frame scalings).
        if self.terms.len() == 1 && self.terms[0].deg == 0 {
            return other.scale(&self.terms[0].coeff).truncate(order).with_order(order);
        }
        if other.terms.len() == 1 && other.terms[0].deg == 0 {
            return self.scale(&other.terms[0].coeff).truncate(order).with_order(order);
        }
        if let Some(out) = self.mul_integral(other, order) {
            return out;
        }
        let mut acc: FxHashMap<MultiIndex, Rational> = FxHashMap::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 2);
        let capped = self.vars.is_capped();
        for x in &self.terms {
            if x.deg > order {
                break;
            }
            let room = order - x.deg;
            for y in &other.terms {
                if y.deg > room {
                    break;
                }
                let mono = x.mono.plus(y.mono);
                if capped && !self.vars.admits(mono) {
                    continue;
                }
                let p = &x.coeff * &y.coeff;
                acc.entry(mono).and_modify(|c| *c += &p).or_insert(p);
            }
        }
        Jet::from_map(self.vars, order, acc)
    }

    /// Coefficients over a common denominator, if everything fits in `i64`.
    fn integral(&self, order: u32) -> Option<(Vec<i64>, i64)> {
        let mut den: i64 = 1;
        for t in self.terms.iter().take_while(|t| t.deg <= order) {
            let (_, d) = t.coeff.as_small()?;
            let g = gcd(den, d);
            den = den.checked_mul(d / g)?;
        }
        let nums = self
            .terms
            .iter()
            .take_while(|t| t.deg <= order)
            .map(|t| {
                let (n, d) = t.coeff.as_small()?;
                n.checked_mul(den / d)
            })
            .collect::<Option<Vec<_>>>()?;
        Some((nums, den))
    }

    /// Product with integer accumulation; `None` on overflow.
    fn mul_integral(&self, other: &Jet, order: u32) -> Option<Jet> {
        let (xa, da) = self.integral(order)?;
        let (xb, db) = other.integral(order)?;
        let den = (da as i128).checked_mul(db as i128)?;
        let mut acc: FxHashMap<MultiIndex, i128> = FxHashMap::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 2);
        let capped = self.vars.is_capped();
        for (x, &a) in self.terms.iter().zip(&xa) {
            let room = order - x.deg;
            for (y, &b) in other.terms.iter().zip(&xb) {
                if y.deg > room {
                    break;
                }
                let mono = x.mono.plus(y.mono);
                if capped && !self.vars.admits(mono) {
                    continue;
                }
                let p = a as i128 * b as i128;
                let e = acc.entry(mono).or_insert(0);
                *e = e.checked_add(p)?;
            }
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(mono, c)| Term { deg: self.vars.degree(mono), mono, coeff: Rational::from_i128(c, den) })
            .collect();
        terms.sort_by_key(term_key);
        Some(Jet { vars: self.vars, order, terms })
    }

    pub fn scale(&self, c: &Rational) -> Jet {
        if c.is_zero() {
            return Jet::zero(self.vars, self.order);
        }
        let terms = self.terms.iter().map(|t| Term { deg: t.deg, mono: t.mono, coeff: &t.coeff * c }).collect();
        Jet { vars: self.vars, order: self.order, terms }
    }

    /// Multiplies by `c * x^mono`. A known jet times an exact monomial is
    /// known to a correspondingly higher degree, so the order shifts up.
    pub fn mul_monomial(&self, mono: MultiIndex, c: &Rational) -> Jet {
        let shift = self.vars.degree(mono);
        let order = self.order + shift;
        if c.is_zero() {
            return Jet::zero(self.vars, order);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term { deg: t.deg + shift, mono: t.mono.plus(mono), coeff: &t.coeff * c })
            .filter(|t| self.vars.admits(t.mono))
            .collect();
        Jet { vars: self.vars, order, terms }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn invert(&self) -> Result<Jet, JetError> {
        let a0 = self.eval0();
        let inv0 = a0.recip().ok_or(JetError::ZeroConstantTerm)?;
        // 1/a = inv0 * sum_k (-u)^k with u = a*inv0 - 1, which has no constant term.
        let one = Jet::one(self.vars, self.order);
        let u = self.scale(&inv0).merge(&one, true);
        let neg_u = -&u;
        let mut result = one.clone();
        let mut power = one;
        let min_deg = u.terms.first().map(|t| t.deg).unwrap_or(u32::MAX);
        let mut k = 1u32;
        while !u.is_zero() && k.saturating_mul(min_deg) <= self.order {
            power = power.mul_unchecked(&neg_u);
            if power.is_zero() {
                break;
            }
            result = result.merge(&power, false);
            k += 1;
        }
        Ok(result.scale(&inv0))
    }

    /// Formal partial derivative. The order drops by the weight of `var`,
    /// saturating at zero. A saturated result claims a constant term it
    /// cannot know, so callers must budget derivatives themselves.
    pub fn partial(&self, var: usize) -> Result<Jet, JetError> {
        if var >= self.nvars() {
            return Err(JetError::VarOutOfRange { var, nvars: self.nvars() });
        }
        let w = self.vars.weight(var);
        let order = self.order.saturating_sub(w);
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .filter_map(|t| {
                let e = t.mono.exponent(var);
                if e == 0 || t.deg - w > order {
                    return None;
                }
                Some(Term {
                    deg: t.deg - w,
                    mono: t.mono.lower(var),
                    coeff: &t.coeff * &Rational::from_integer(e as i64),
                })
            })
            .collect();
        terms.sort_by_key(term_key);
        Ok(Jet { vars: self.vars, order, terms })
    }

    /// Coefficient of `x_var^power`, as a jet in the same variables with that
    /// variable removed. Its order drops by the weight of the factored power;
    /// `None` when that coefficient is beyond the truncation order.
    pub fn coefficient_of(&self, var: usize, power: u32) -> Option<Jet> {
        let shift = power * self.vars.weight(var);
        let order = self.order.checked_sub(shift)?;
        let strip = MultiIndex::from_exponents(&{
            let mut e = vec![0; self.nvars()];
            e[var] = power;
            e
        });
        let terms = self
            .terms
            .iter()
            .filter(|t| t.mono.exponent(var) == power)
            .map(|t| Term { deg: t.deg - shift, mono: MultiIndex(t.mono.0 - strip.0), coeff: t.coeff.clone() })
            .collect();
        Some(Jet { vars: self.vars, order, terms })
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(MultiIndex) -> bool) -> Jet {
        let terms = self.terms.iter().filter(|t| keep(t.mono)).cloned().collect();
        Jet { vars: self.vars, order: self.order, terms }
    }

    /// Moves the series to another variable set. `map[i]` is the new index
    /// of old variable `i`; `None` evaluates that variable at zero. Terms
    /// above `order` in the target grading are dropped. The caller vouches
    /// that `order` is justified by what was known.
    pub fn reindex(&self, target: Vars, map: &[Option<usize>], order: u32) -> Jet {
        assert_eq!(map.len(), self.nvars());
        let terms = self.terms.iter().filter_map(|t| {
            let mut exps = [0u32; MAX_VARS];
            for (i, slot) in map.iter().enumerate() {
                let e = t.mono.exponent(i);
                match slot {
                    Some(j) => exps[*j] += e,
                    None if e > 0 => return None,
                    None => {}
                }
            }
            Some((MultiIndex::from_exponents(&exps[..target.nvars()]), t.coeff.clone()))
        });
        Jet::from_terms(target, order, terms)
    }

    /// Formal Taylor data about the base point as a polynomial string.
    pub fn to_poly_string(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for v in 0..self.nvars() {
                match t.mono.exponent(v) {
                    0 => {}
                    1 => factors.push(names[v].to_string()),
                    e => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            let c = &t.coeff;
            let neg = c.signum() < 0;
            let mag = c.abs();
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", mag, factors.join("*"))
            };
            match (i, neg) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        out
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars()).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "Jet[o={}]({})", self.order, self.to_poly_string(&refs))
    }
}

impl Add for &Jet {
    type Output = Jet;
    /// Panics on a variable-set mismatch; use [`Jet::try_add`] to handle it.
    fn add(self, rhs: &Jet) -> Jet {
        self.try_add(rhs).expect("jet variable mismatch")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.try_sub(rhs).expect("jet variable mismatch")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.try_mul(rhs).expect("jet variable mismatch")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let terms = self.terms.iter().map(|t| Term { deg: t.deg, mono: t.mono, coeff: -&t.coeff }).collect();
        Jet { vars: self.vars, order: self.order, terms }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}
