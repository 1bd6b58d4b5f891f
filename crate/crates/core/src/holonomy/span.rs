use crate::linalg::{Matrix, RowSpace};

use super::Endomorphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorStatus {
    /// Enlarged the span.
    New,
    /// Nonzero but already in the span.
    Dependent,
    Zero,
    /// Contains the direction `T`; zero by identity, not evaluated.
    ShortCircuit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorRecord {
    pub index: Vec<usize>,
    pub status: GeneratorStatus,
}

/// Exact span of endomorphisms of an `N`-dimensional space, with the order
/// history of its growth.
#[derive(Clone, Debug)]
pub struct HolonomySpan {
    size: usize,
    space: RowSpace,
    history: Vec<(usize, usize)>,
    log: Vec<GeneratorRecord>,
    stabilized: bool,
}

impl HolonomySpan {
    pub fn new(size: usize) -> Self {
        HolonomySpan {
            size,
            space: RowSpace::new(size * size),
            history: Vec::new(),
            log: Vec::new(),
            stabilized: false,
        }
    }

    /// Side length `N` of the matrices.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.space.rank()
    }

    pub fn basis(&self) -> Vec<Matrix> {
        self.space.basis().iter().map(|r| Matrix::from_entries(self.size, self.size, r.clone())).collect()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.space.contains(m.entries())
    }

    /// `(k, dim)` after all generators of derivative order `k`.
    pub fn history(&self) -> &[(usize, usize)] {
        &self.history
    }

    pub fn generator_log(&self) -> &[GeneratorRecord] {
        &self.log
    }

    /// Dimension unchanged over the last two orders and closed under
    /// commutators.
    pub fn stabilized(&self) -> bool {
        self.stabilized
    }

    pub fn history_nondecreasing(&self) -> bool {
        self.history.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    pub(crate) fn offer(&mut self, index: Vec<usize>, m: &Matrix) -> bool {
        let status = if m.is_zero() {
            GeneratorStatus::Zero
        } else if self.space.insert(m.entries()) {
            GeneratorStatus::New
        } else {
            GeneratorStatus::Dependent
        };
        self.log.push(GeneratorRecord { index, status });
        status == GeneratorStatus::New
    }

    pub(crate) fn record_short_circuit(&mut self, index: Vec<usize>) {
        self.log.push(GeneratorRecord { index, status: GeneratorStatus::ShortCircuit });
    }

    pub(crate) fn close_order(&mut self, k: usize) {
        self.history.push((k, self.dim()));
    }

    pub(crate) fn finish(&mut self) {
        let flat = match self.history.as_slice() {
            [.., (_, a), (_, b)] => a == b,
            _ => false,
        };
        self.stabilized = flat && commutator_closure_check(self);
    }
}

/// Accumulates endomorphisms in order of derivative length.
pub fn span_accumulate(size: usize, endos: &[Endomorphism]) -> HolonomySpan {
    let mut sorted: Vec<&Endomorphism> = endos.iter().collect();
    sorted.sort_by_key(|e| e.provenance.len());
    let mut span = HolonomySpan::new(size);
    let mut current = None;
    for e in sorted {
        let k = e.provenance.len();
        if let Some(c) = current {
            if c != k {
                span.close_order(c);
            }
        }
        current = Some(k);
        span.offer(e.provenance.clone(), &e.matrix);
    }
    if let Some(c) = current {
        span.close_order(c);
    }
    span.finish();
    span
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanRelation {
    Equal,
    /// `a ⊊ b`.
    AInB,
    /// `b ⊊ a`.
    BInA,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanComparison {
    pub relation: SpanRelation,
    pub dim_a: usize,
    pub dim_b: usize,
    /// An element of one span missing from the other, unless equal.
    pub witness: Option<Matrix>,
}

pub fn compare_spans(a: &HolonomySpan, b: &HolonomySpan) -> SpanComparison {
    assert_eq!(a.size, b.size, "spans act on spaces of different dimension");
    let missing_in = |from: &HolonomySpan, into: &HolonomySpan| from.basis().into_iter().find(|m| !into.contains(m));
    let a_not_in_b = missing_in(a, b);
    let b_not_in_a = missing_in(b, a);
    let (relation, witness) = match (a_not_in_b, b_not_in_a) {
        (None, None) => (SpanRelation::Equal, None),
        (None, Some(w)) => (SpanRelation::AInB, Some(w)),
        (Some(w), None) => (SpanRelation::BInA, Some(w)),
        (Some(w), Some(_)) => (SpanRelation::Incomparable, Some(w)),
    };
    SpanComparison { relation, dim_a: a.dim(), dim_b: b.dim(), witness }
}

/// `[E_i, E_j]` lies in the span for every pair of basis elements.
pub fn commutator_closure_check(s: &HolonomySpan) -> bool {
    let basis = s.basis();
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i + 1..] {
            if !s.contains(&x.commutator(y)) {
                return false;
            }
        }
    }
    true
}

/// `Eᵀh + hE = 0` for every basis element.
pub fn skewness_check(s: &HolonomySpan, h: &Matrix) -> bool {
    s.basis().iter().all(|e| (&(&e.transpose() * h) + &(h * e)).is_zero())
}
