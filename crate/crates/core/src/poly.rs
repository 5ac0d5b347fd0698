//! Sparse polynomials in `x, y, z` over an exact field.
//!
//! Terms are stored in a vector sorted strictly descending by exponent
//! vector (the `>_1` order), with no zero coefficients. Equality of
//! polynomials is therefore equality of term vectors.

use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::field::{BaseField, Field, SampleRng};
use crate::monomial::Monomial;

pub type Term<K> = (Monomial, <K as Field>::Elem);

/// Operand count above which multiplication accumulates in a hash map
/// instead of merging shifted copies.
const MERGE_LIMIT: usize = 24;

/// Optional cap on the number of terms any intermediate result may hold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    max_terms: Option<usize>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_terms: None };

    pub fn terms(max_terms: usize) -> Self {
        Budget { max_terms: Some(max_terms) }
    }

    pub fn limit(&self) -> Option<usize> {
        self.max_terms
    }

    pub fn check(&self, reached: usize) -> Result<()> {
        match self.max_terms {
            Some(limit) if reached > limit => Err(Error::BudgetExceeded { limit, reached }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<K: Field> {
    field: K,
    terms: Vec<Term<K>>,
}

impl<K: Field> Polynomial<K> {
    pub fn zero(field: &K) -> Self {
        Polynomial { field: field.clone(), terms: Vec::new() }
    }

    pub fn one(field: &K) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &K, c: K::Elem) -> Self {
        Self::monomial(field, Monomial::ONE, c)
    }

    pub fn monomial(field: &K, m: Monomial, c: K::Elem) -> Self {
        let terms = if field.is_zero(&c) { Vec::new() } else { vec![(m, c)] };
        Polynomial { field: field.clone(), terms }
    }

    /// The coordinate function `x`, `y` or `z` (`var` = 0, 1, 2).
    pub fn var(field: &K, var: usize) -> Self {
        Self::monomial(field, Monomial::var(var), field.one())
    }

    pub fn x(field: &K) -> Self {
        Self::var(field, 0)
    }
    pub fn y(field: &K) -> Self {
        Self::var(field, 1)
    }
    pub fn z(field: &K) -> Self {
        Self::var(field, 2)
    }

    /// Builds a canonical polynomial from arbitrary terms, summing repeats.
    pub fn from_terms(field: &K, terms: impl IntoIterator<Item = Term<K>>) -> Self {
        let mut terms: Vec<Term<K>> = terms.into_iter().collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        let mut out: Vec<Term<K>> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(&last.1, &c),
                _ => {
                    if let Some(last) = out.last() {
                        if field.is_zero(&last.1) {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|t| field.is_zero(&t.1)) {
            out.pop();
        }
        Self::from_sorted(field.clone(), out)
    }

    fn from_sorted(field: K, terms: Vec<Term<K>>) -> Self {
        debug_assert!(
            terms.windows(2).all(|w| w[0].0 > w[1].0) && terms.iter().all(|t| !field.is_zero(&t.1)),
            "non-canonical term list"
        );
        Polynomial { field, terms }
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Monomial::ONE && self.field.is_one(&self.terms[0].1)
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending `>_1` order.
    pub fn terms(&self) -> &[Term<K>] {
        &self.terms
    }

    /// Exponent vectors with nonzero coefficient, descending.
    pub fn support(&self) -> Vec<Monomial> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&K::Elem> {
        self.terms.binary_search_by(|t| m.cmp(&t.0)).ok().map(|idx| &self.terms[idx].1)
    }

    /// Largest support vector under `key`; `None` for the zero polynomial.
    pub fn max_monomial_by<T: Ord>(&self, key: impl Fn(&Monomial) -> T) -> Option<Monomial> {
        self.terms.iter().map(|t| t.0).max_by_key(key)
    }

    /// Maximum of `w . v` over the support.
    pub fn weighted_degree(&self, w: [u64; 3]) -> Option<u64> {
        self.terms.iter().map(|t| t.0.dot(w)).max()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.weighted_degree([1, 1, 1])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.0 == Monomial::ONE)
    }

    pub fn as_constant(&self) -> Option<K::Elem> {
        match self.terms.as_slice() {
            [] => Some(self.field.zero()),
            [(m, c)] if *m == Monomial::ONE => Some(c.clone()),
            _ => None,
        }
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field.spec(), right: other.field.spec() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.clone().add_owned(other.clone()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.clone().add_owned(other.neg()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.mul_budget(other, Budget::UNLIMITED)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (*m, self.field.neg(c))).collect();
        Self::from_sorted(self.field.clone(), terms)
    }

    pub fn scale(&self, c: &K::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field);
        }
        let terms = self.terms.iter().map(|(m, a)| (*m, self.field.mul(a, c))).collect();
        Self::from_sorted(self.field.clone(), terms)
    }

    /// Multiplies by the monomial `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &K::Elem) -> Result<Self> {
        if self.field.is_zero(c) {
            return Ok(Self::zero(&self.field));
        }
        let terms = self
            .terms
            .iter()
            .map(|(v, a)| Ok((v.checked_add(m)?, self.field.mul(a, c))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_sorted(self.field.clone(), terms))
    }

    pub(crate) fn add_owned(self, other: Self) -> Self {
        let terms = merge_add(&self.field, self.terms, other.terms);
        Self::from_sorted(self.field, terms)
    }

    pub fn mul_budget(&self, other: &Self, budget: Budget) -> Result<Self> {
        self.check_field(other)?;
        let field = &self.field;
        let (small, big) =
            if self.len() <= other.len() { (&self.terms, &other.terms) } else { (&other.terms, &self.terms) };
        if small.is_empty() {
            return Ok(Self::zero(field));
        }
        let (ms, mb) = (max_exponents(small), max_exponents(big));
        for v in 0..3 {
            ms[v].checked_add(mb[v]).ok_or(Error::ExponentOverflow)?;
        }
        let terms = if small.len() <= MERGE_LIMIT {
            let parts = small
                .iter()
                .map(|(m, c)| big.iter().map(|(v, a)| (m.add_unchecked(v), field.mul(c, a))).collect::<Vec<_>>())
                .collect();
            merge_tree(field, parts)
        } else {
            let mut acc: FxHashMap<Monomial, K::Elem> = FxHashMap::default();
            for (m, c) in small {
                for (v, a) in big {
                    let p = field.mul(c, a);
                    acc.entry(m.add_unchecked(v)).and_modify(|e| *e = field.add(e, &p)).or_insert(p);
                }
                budget.check(acc.len())?;
            }
            let mut terms: Vec<Term<K>> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
            terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
            terms
        };
        budget.check(terms.len())?;
        Ok(Self::from_sorted(field.clone(), terms))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        self.pow_budget(e, Budget::UNLIMITED)
    }

    /// Binary exponentiation; `P^0 = 1` for every `P`.
    pub fn pow_budget(&self, mut e: u32, budget: Budget) -> Result<Self> {
        let mut acc = Self::one(&self.field);
        if e == 0 {
            return Ok(acc);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return Ok(Self::monomial(&self.field, m.checked_scale(e)?, self.field.pow(c, e as u64)));
        }
        let mut base = self.clone();
        loop {
            if e & 1 == 1 {
                acc = acc.mul_budget(&base, budget)?;
            }
            e >>= 1;
            if e == 0 {
                return Ok(acc);
            }
            base = base.mul_budget(&base, budget)?;
        }
    }

    /// The image `P(F, G, H)` of `P` under the endomorphism with
    /// components `(F, G, H)`.
    ///
    /// Nested Horner evaluation (in `x`, then `y`, then `z`) with cached
    /// powers of the images for exponent gaps. When every image is a single
    /// term the substitution is a relabelling of exponents.
    pub fn substitute(&self, images: [&Self; 3], budget: Budget) -> Result<Self> {
        for img in images {
            self.check_field(img)?;
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if images.iter().all(|p| p.len() == 1) {
            return self.substitute_monomials(images, budget);
        }
        let mut fx = PowerCache::new(images[0], budget);
        let mut gy = PowerCache::new(images[1], budget);
        let mut hz = PowerCache::new(images[2], budget);
        let mut acc: Option<(u32, Self)> = None;
        for group in self.terms.chunk_by(|a, b| a.0.i == b.0.i) {
            let i = group[0].0.i;
            let inner = self.substitute_yz(group, &mut gy, &mut hz, budget)?;
            let next = match acc {
                None => inner,
                Some((prev, sum)) => sum.mul_budget(fx.get(prev - i)?.as_ref(), budget)?.add_owned(inner),
            };
            budget.check(next.len())?;
            acc = Some((i, next));
        }
        let (last, sum) = acc.expect("nonzero polynomial has a term");
        if last == 0 {
            Ok(sum)
        } else {
            sum.mul_budget(fx.get(last)?.as_ref(), budget)
        }
    }

    fn substitute_yz(
        &self,
        group: &[Term<K>],
        gy: &mut PowerCache<'_, K>,
        hz: &mut PowerCache<'_, K>,
        budget: Budget,
    ) -> Result<Self> {
        let mut acc: Option<(u32, Self)> = None;
        for chunk in group.chunk_by(|a, b| a.0.j == b.0.j) {
            let j = chunk[0].0.j;
            let inner = self.substitute_z(chunk, hz, budget)?;
            let next = match acc {
                None => inner,
                Some((prev, sum)) => sum.mul_budget(gy.get(prev - j)?.as_ref(), budget)?.add_owned(inner),
            };
            acc = Some((j, next));
        }
        let (last, sum) = acc.expect("nonempty group");
        if last == 0 {
            Ok(sum)
        } else {
            sum.mul_budget(gy.get(last)?.as_ref(), budget)
        }
    }

    fn substitute_z(&self, chunk: &[Term<K>], hz: &mut PowerCache<'_, K>, budget: Budget) -> Result<Self> {
        let field = &self.field;
        if let [(hm, hc)] = hz.base.terms.as_slice() {
            let terms = chunk
                .iter()
                .map(|(v, c)| Ok((hm.checked_scale(v.k)?, field.mul(c, &field.pow(hc, v.k as u64)))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::from_terms(field, terms));
        }
        let mut acc: Option<(u32, Self)> = None;
        for (v, c) in chunk {
            let constant = Self::constant(field, c.clone());
            let next = match acc {
                None => constant,
                Some((prev, sum)) => sum.mul_budget(hz.get(prev - v.k)?.as_ref(), budget)?.add_owned(constant),
            };
            acc = Some((v.k, next));
        }
        let (last, sum) = acc.expect("nonempty chunk");
        if last == 0 {
            Ok(sum)
        } else {
            sum.mul_budget(hz.get(last)?.as_ref(), budget)
        }
    }

    fn substitute_monomials(&self, images: [&Self; 3], budget: Budget) -> Result<Self> {
        let field = &self.field;
        let [(m0, c0), (m1, c1), (m2, c2)] = [&images[0].terms[0], &images[1].terms[0], &images[2].terms[0]];
        let unit = field.is_one(c0) && field.is_one(c1) && field.is_one(c2);
        let terms = self
            .terms
            .iter()
            .map(|(v, a)| {
                let m = m0
                    .checked_scale(v.i)?
                    .checked_add(&m1.checked_scale(v.j)?)?
                    .checked_add(&m2.checked_scale(v.k)?)?;
                let c = if unit {
                    a.clone()
                } else {
                    let c = field.mul(a, &field.pow(c0, v.i as u64));
                    let c = field.mul(&c, &field.pow(c1, v.j as u64));
                    field.mul(&c, &field.pow(c2, v.k as u64))
                };
                Ok((m, c))
            })
            .collect::<Result<Vec<_>>>()?;
        let out = Self::from_terms(field, terms);
        budget.check(out.len())?;
        Ok(out)
    }

    /// Value at a point of `K^3`.
    pub fn eval(&self, point: &[K::Elem; 3]) -> K::Elem {
        let f = &self.field;
        self.terms.iter().fold(f.zero(), |acc, (m, c)| {
            let t = f.mul(c, &f.pow(&point[0], m.i as u64));
            let t = f.mul(&t, &f.pow(&point[1], m.j as u64));
            let t = f.mul(&t, &f.pow(&point[2], m.k as u64));
            f.add(&acc, &t)
        })
    }

    /// Image of the polynomial under a coefficient map into another field.
    /// `None` if some coefficient has no image.
    pub fn map_field<E: Field>(&self, target: &E, f: impl Fn(&K::Elem) -> Option<E::Elem>) -> Option<Polynomial<E>> {
        let terms = self.terms.iter().map(|(m, c)| f(c).map(|d| (*m, d))).collect::<Option<Vec<_>>>()?;
        Some(Polynomial::from_terms(target, terms))
    }
}

impl<K: BaseField> Polynomial<K> {
    /// Random polynomial with `terms` distinct support vectors whose
    /// exponents are at most `max_exp`; coefficients are nonzero.
    pub fn random(field: &K, terms: usize, max_exp: u32, rng: &mut SampleRng) -> Self {
        let terms = (0..terms).map(|_| {
            let m = Monomial::new(rng.gen_range(0..=max_exp), rng.gen_range(0..=max_exp), rng.gen_range(0..=max_exp));
            (m, field.random_nonzero(rng))
        });
        Self::from_terms(field, terms)
    }
}

fn max_exponents<E>(terms: &[(Monomial, E)]) -> [u32; 3] {
    terms.iter().fold([0; 3], |acc, (m, _)| [acc[0].max(m.i), acc[1].max(m.j), acc[2].max(m.k)])
}

fn merge_add<K: Field>(field: &K, a: Vec<Term<K>>, b: Vec<Term<K>>) -> Vec<Term<K>> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let ord = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => {
                out.extend(a);
                break;
            }
            (None, _) => {
                out.extend(b);
                break;
            }
        };
        match ord {
            Ordering::Greater => out.push(a.next().expect("peeked")),
            Ordering::Less => out.push(b.next().expect("peeked")),
            Ordering::Equal => {
                let (m, c) = a.next().expect("peeked");
                let (_, d) = b.next().expect("peeked");
                let s = field.add(&c, &d);
                if !field.is_zero(&s) {
                    out.push((m, s));
                }
            }
        }
    }
    out
}

fn merge_tree<K: Field>(field: &K, mut parts: Vec<Vec<Term<K>>>) -> Vec<Term<K>> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge_add(field, a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

struct PowerCache<'a, K: Field> {
    base: &'a Polynomial<K>,
    budget: Budget,
    powers: FxHashMap<u32, Rc<Polynomial<K>>>,
}

impl<'a, K: Field> PowerCache<'a, K> {
    fn new(base: &'a Polynomial<K>, budget: Budget) -> Self {
        PowerCache { base, budget, powers: FxHashMap::default() }
    }

    fn get(&mut self, e: u32) -> Result<Rc<Polynomial<K>>> {
        if let Some(p) = self.powers.get(&e) {
            return Ok(p.clone());
        }
        let p = match e.checked_sub(1).and_then(|prev| self.powers.get(&prev)) {
            Some(prev) => prev.mul_budget(self.base, self.budget)?,
            None => self.base.pow_budget(e, self.budget)?,
        };
        let p = Rc::new(p);
        self.powers.insert(e, p.clone());
        Ok(p)
    }
}

impl<K: Field> std::ops::Add for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn add(self, rhs: Self) -> Polynomial<K> {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl<K: Field> std::ops::Sub for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn sub(self, rhs: Self) -> Polynomial<K> {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl<K: Field> std::ops::Mul for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn mul(self, rhs: Self) -> Polynomial<K> {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl<K: Field> std::ops::Neg for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn neg(self) -> Polynomial<K> {
        Polynomial::neg(self)
    }
}

pub(crate) fn format_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("x", m.i), ("y", m.j), ("z", m.k)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl<K: Field> fmt::Display for Polynomial<K> {
    /// Canonical text: terms in descending `>_1` order, unit coefficients
    /// and unit exponents elided, e.g. `x + y^4 + 2*y^3*z^2 + y^2*z^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let text = self.field.format_elem(c);
            let (negative, magnitude) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{magnitude}")?;
            } else if magnitude == "1" {
                write!(f, "{}", format_monomial(m))?;
            } else {
                write!(f, "{magnitude}*{}", format_monomial(m))?;
            }
        }
        Ok(())
    }
}
