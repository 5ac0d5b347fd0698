//! Degree functions: weighted degrees and the cyclic lexicographic degrees.

use std::cmp::Ordering;
use std::fmt;

use crate::field::{Field, Rationals};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::word::beta_components;

/// A nonzero weight vector `w`, defining `deg_w(P) = max { w . v }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector([u64; 3]);

impl WeightVector {
    pub fn new(w: [u64; 3]) -> Option<Self> {
        (w != [0, 0, 0]).then_some(WeightVector(w))
    }

    pub fn get(&self) -> [u64; 3] {
        self.0
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Exponents of `v` read in the order `e_i, e_{i+1}, ...` (cyclically),
/// so that plain lexicographic comparison of the result is `>_i`.
fn rotated(v: &Monomial, order: usize) -> [u32; 3] {
    let e = v.exps();
    let s = order - 1;
    [e[s % 3], e[(s + 1) % 3], e[(s + 2) % 3]]
}

/// Compares under the `order`-th cyclic lexicographic order (1, 2 or 3).
pub fn cyclic_lex_cmp(u: &Monomial, v: &Monomial, order: usize) -> Ordering {
    assert!((1..=3).contains(&order), "cyclic order index must be 1, 2 or 3");
    rotated(u, order).cmp(&rotated(v, order))
}

/// The `>_i`-maximal support vector, `None` for the zero polynomial.
pub fn ldeg<K: Field>(p: &Polynomial<K>, order: usize) -> Option<Monomial> {
    assert!((1..=3).contains(&order), "cyclic order index must be 1, 2 or 3");
    if order == 1 {
        return p.terms().first().map(|t| t.0);
    }
    p.max_monomial_by(|m| rotated(m, order))
}

pub fn weighted_deg<K: Field>(p: &Polynomial<K>, w: WeightVector) -> DegreeValue {
    match p.weighted_degree(w.0) {
        Some(d) => DegreeValue::Weighted(d),
        None => DegreeValue::MinusInfinity,
    }
}

/// A value of a degree function: `-inf` or an element of the target monoid.
///
/// Values of different degree functions are never compared with each other;
/// doing so panics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegreeValue {
    MinusInfinity,
    Weighted(u64),
    Lex { order: usize, v: Monomial },
}

impl DegreeValue {
    /// Monoid addition, absorbing `-inf`.
    pub fn add(&self, other: &DegreeValue) -> DegreeValue {
        use DegreeValue::*;
        match (self, other) {
            (MinusInfinity, _) | (_, MinusInfinity) => MinusInfinity,
            (Weighted(a), Weighted(b)) => Weighted(a + b),
            (Lex { order, v }, Lex { order: o2, v: w }) if order == o2 => {
                Lex { order: *order, v: v.checked_add(w).expect("degree overflow") }
            }
            _ => panic!("adding values of different degree functions"),
        }
    }

    pub fn as_weighted(&self) -> Option<u64> {
        match self {
            DegreeValue::Weighted(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_lex(&self) -> Option<Monomial> {
        match self {
            DegreeValue::Lex { v, .. } => Some(*v),
            _ => None,
        }
    }
}

impl PartialOrd for DegreeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DegreeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use DegreeValue::*;
        match (self, other) {
            (MinusInfinity, MinusInfinity) => Ordering::Equal,
            (MinusInfinity, _) => Ordering::Less,
            (_, MinusInfinity) => Ordering::Greater,
            (Weighted(a), Weighted(b)) => a.cmp(b),
            (Lex { order, v }, Lex { order: o2, v: w }) if order == o2 => cyclic_lex_cmp(v, w, *order),
            _ => panic!("comparing values of different degree functions"),
        }
    }
}

impl fmt::Display for DegreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeValue::MinusInfinity => write!(f, "-inf"),
            DegreeValue::Weighted(d) => write!(f, "{d}"),
            DegreeValue::Lex { v, .. } => write!(f, "{v}"),
        }
    }
}

/// A degree function on `K[x, y, z]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegreeFn {
    Weighted(WeightVector),
    Lex(usize),
}

impl DegreeFn {
    pub fn weighted(w: [u64; 3]) -> Self {
        DegreeFn::Weighted(WeightVector::new(w).expect("nonzero weight"))
    }

    pub fn lex(order: usize) -> Self {
        assert!((1..=3).contains(&order), "cyclic order index must be 1, 2 or 3");
        DegreeFn::Lex(order)
    }

    /// The three cyclic lexicographic degrees followed by the weighted
    /// degrees for `(4,1,0)`, `(4,0,1)`, `(8,2,1)`, `(1,1,0)`, `(3,3,1)`
    /// and `(1,1,1)`.
    pub fn registered() -> Vec<DegreeFn> {
        let mut out: Vec<DegreeFn> = (1..=3).map(DegreeFn::Lex).collect();
        for w in [[4, 1, 0], [4, 0, 1], [8, 2, 1], [1, 1, 0], [3, 3, 1], [1, 1, 1]] {
            out.push(DegreeFn::weighted(w));
        }
        out
    }

    pub fn eval<K: Field>(&self, p: &Polynomial<K>) -> DegreeValue {
        match self {
            DegreeFn::Weighted(w) => weighted_deg(p, *w),
            DegreeFn::Lex(order) => match ldeg(p, *order) {
                Some(v) => DegreeValue::Lex { order: *order, v },
                None => DegreeValue::MinusInfinity,
            },
        }
    }

    /// Degree of the monomial `x^v`.
    pub fn of_monomial(&self, v: &Monomial) -> DegreeValue {
        match self {
            DegreeFn::Weighted(w) => DegreeValue::Weighted(v.dot(w.get())),
            DegreeFn::Lex(order) => DegreeValue::Lex { order: *order, v: *v },
        }
    }
}

impl fmt::Display for DegreeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeFn::Weighted(w) => write!(f, "deg{w}"),
            DegreeFn::Lex(order) => write!(f, "ldeg{order}"),
        }
    }
}

/// Whether `deg(X) > deg(Y) > deg(Z)` for the components of `beta`.
pub fn check_beta_lexicographic(deg: &DegreeFn) -> bool {
    let [x, y, z] = beta_components(&Rationals);
    let (dx, dy, dz) = (deg.eval(&x), deg.eval(&y), deg.eval(&z));
    dx > dy && dy > dz
}
