//! The generators `beta`, `beta^-1`, `pi`, and lazy words over them.
//!
//! A word `[a1, a2, ..., ak]` denotes the composite `a1 a2 ... ak` in the
//! right-action convention: a polynomial is substituted into `a1` first, and
//! a point is moved by `ak` first.

use std::fmt;

use crate::affine::AffineMap;
use crate::endomorphism::Endomorphism;
use crate::error::Result;
use crate::field::Field;
use crate::poly::{Budget, Polynomial};

/// Components of `beta = (x + y^2 (y + z^2)^2, y + z^2, z)`.
pub fn beta_components<K: Field>(field: &K) -> [Polynomial<K>; 3] {
    beta_like(field, false)
}

fn beta_like<K: Field>(field: &K, inverse: bool) -> [Polynomial<K>; 3] {
    let (x, y, z) = (Polynomial::x(field), Polynomial::y(field), Polynomial::z(field));
    let z2 = &z * &z;
    let shifted = if inverse { &y - &z2 } else { &y + &z2 };
    let tail = &(&y * &y) * &(&shifted * &shifted);
    let first = if inverse { &x - &tail } else { &x + &tail };
    [first, shifted, z]
}

pub fn beta<K: Field>(field: &K) -> Endomorphism<K> {
    Endomorphism::new(beta_like(field, false))
}

/// `beta^-1 = (x - y^2 (y - z^2)^2, y - z^2, z)`.
pub fn beta_inv<K: Field>(field: &K) -> Endomorphism<K> {
    Endomorphism::new(beta_like(field, true))
}

/// The transposition `(y, x, z)`.
pub fn pi<K: Field>(field: &K) -> Endomorphism<K> {
    Endomorphism::new([Polynomial::y(field), Polynomial::x(field), Polynomial::z(field)])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom<K: Field> {
    Pi,
    Beta,
    BetaInv,
    Affine(AffineMap<K>),
    Raw(Endomorphism<K>),
}

impl<K: Field> Atom<K> {
    pub fn to_endomorphism(&self, field: &K) -> Endomorphism<K> {
        match self {
            Atom::Pi => pi(field),
            Atom::Beta => beta(field),
            Atom::BetaInv => beta_inv(field),
            Atom::Affine(a) => a.to_endomorphism(),
            Atom::Raw(e) => e.clone(),
        }
    }

    /// The atom as a map `K^3 -> K^3`.
    pub fn eval(&self, field: &K, p: &[K::Elem; 3]) -> [K::Elem; 3] {
        let f = field;
        match self {
            Atom::Pi => [p[1].clone(), p[0].clone(), p[2].clone()],
            Atom::Beta | Atom::BetaInv => {
                let [x, y, z] = p;
                let z2 = f.mul(z, z);
                let s = if matches!(self, Atom::Beta) { f.add(y, &z2) } else { f.sub(y, &z2) };
                let t = f.mul(&f.mul(y, y), &f.mul(&s, &s));
                let first = if matches!(self, Atom::Beta) { f.add(x, &t) } else { f.sub(x, &t) };
                [first, s, z.clone()]
            }
            Atom::Affine(a) => a.eval(p),
            Atom::Raw(e) => e.eval(p),
        }
    }

    fn cancels(&self, other: &Self) -> bool {
        matches!((self, other), (Atom::Pi, Atom::Pi) | (Atom::Beta, Atom::BetaInv) | (Atom::BetaInv, Atom::Beta))
    }

    /// `pi` and explicit affine maps.
    pub fn as_affine(&self, field: &K) -> Option<AffineMap<K>> {
        match self {
            Atom::Pi => Some(AffineMap::pi(field)),
            Atom::Affine(a) => Some(a.clone()),
            _ => None,
        }
    }

    pub fn map_field<E: Field>(&self, target: &E, f: impl Fn(&K::Elem) -> Option<E::Elem>) -> Option<Atom<E>> {
        Some(match self {
            Atom::Pi => Atom::Pi,
            Atom::Beta => Atom::Beta,
            Atom::BetaInv => Atom::BetaInv,
            Atom::Affine(a) => Atom::Affine(a.map_field(target, f)?),
            Atom::Raw(e) => Atom::Raw(e.map_field(target, f)?),
        })
    }
}

impl<K: Field> fmt::Display for Atom<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pi => write!(f, "pi"),
            Atom::Beta => write!(f, "beta"),
            Atom::BetaInv => write!(f, "beta_inv"),
            Atom::Affine(a) => write!(f, "{a}"),
            Atom::Raw(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word<K: Field> {
    field: K,
    atoms: Vec<Atom<K>>,
}

impl<K: Field> Word<K> {
    pub fn new(field: &K, atoms: Vec<Atom<K>>) -> Self {
        Word { field: field.clone(), atoms }
    }

    pub fn empty(field: &K) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn atom(field: &K, atom: Atom<K>) -> Self {
        Self::new(field, vec![atom])
    }

    /// `theta_N = (pi beta)^N pi (beta^-1 pi)^N`, kept as `4N + 1` atoms.
    pub fn theta(field: &K, n: usize) -> Self {
        let mut atoms = Vec::with_capacity(4 * n + 1);
        for _ in 0..n {
            atoms.extend([Atom::Pi, Atom::Beta]);
        }
        atoms.push(Atom::Pi);
        for _ in 0..n {
            atoms.extend([Atom::BetaInv, Atom::Pi]);
        }
        Self::new(field, atoms)
    }

    /// `(pi beta)^k`.
    pub fn pi_beta_power(field: &K, k: usize, inverse_beta: bool) -> Self {
        let b = if inverse_beta { Atom::BetaInv } else { Atom::Beta };
        let atoms = (0..k).flat_map(|_| [Atom::Pi, b.clone()]).collect();
        Self::new(field, atoms)
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn atoms(&self) -> &[Atom<K>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn push(&mut self, atom: Atom<K>) {
        self.atoms.push(atom);
    }

    /// Lazy composition: `self` followed by `other`.
    pub fn then(mut self, other: &Word<K>) -> Self {
        assert_eq!(self.field, other.field, "words over different fields");
        self.atoms.extend(other.atoms.iter().cloned());
        self
    }

    /// `(P)w`, substituting one atom at a time.
    pub fn apply(&self, p: &Polynomial<K>, budget: Budget) -> Result<Polynomial<K>> {
        let mut cur = p.clone();
        for atom in &self.atoms {
            cur = atom.to_endomorphism(&self.field).apply(&cur, budget)?;
            budget.check(cur.len())?;
        }
        Ok(cur)
    }

    /// Eager expansion into component form.
    pub fn to_endomorphism(&self, budget: Budget) -> Result<Endomorphism<K>> {
        let mut acc = Endomorphism::identity(&self.field);
        for atom in &self.atoms {
            acc = acc.compose(&atom.to_endomorphism(&self.field), budget)?;
        }
        Ok(acc)
    }

    /// The word as a map `K^3 -> K^3`; the last atom acts first.
    pub fn eval(&self, p: &[K::Elem; 3]) -> [K::Elem; 3] {
        self.atoms.iter().rev().fold(p.clone(), |acc, atom| atom.eval(&self.field, &acc))
    }

    /// Cancels `pi pi`, `beta beta^-1` and `beta^-1 beta`, and merges runs of
    /// affine atoms (including `pi` next to an explicit affine map), dropping
    /// identities. The result denotes the same automorphism.
    pub fn free_reduce(&self) -> Self {
        let f = &self.field;
        let mut out: Vec<Atom<K>> = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            let mut atom = atom.clone();
            if let Atom::Affine(a) = &atom {
                if a.is_identity() {
                    continue;
                }
                if *a == AffineMap::pi(f) {
                    atom = Atom::Pi;
                }
            }
            loop {
                let Some(top) = out.last() else {
                    out.push(atom);
                    break;
                };
                if top.cancels(&atom) {
                    out.pop();
                    break;
                }
                let merge = matches!(top, Atom::Affine(_)) || matches!(atom, Atom::Affine(_));
                if let (true, Some(a), Some(b)) = (merge, top.as_affine(f), atom.as_affine(f)) {
                    out.pop();
                    let c = a.compose(&b);
                    if c.is_identity() {
                        break;
                    }
                    atom = if c == AffineMap::pi(f) { Atom::Pi } else { Atom::Affine(c) };
                    continue;
                }
                out.push(atom);
                break;
            }
        }
        Word { field: f.clone(), atoms: out }
    }

    pub fn map_field<E: Field>(&self, target: &E, f: impl Fn(&K::Elem) -> Option<E::Elem>) -> Option<Word<E>> {
        let atoms = self.atoms.iter().map(|a| a.map_field(target, &f)).collect::<Option<Vec<_>>>()?;
        Some(Word::new(target, atoms))
    }
}

impl<K: Field> fmt::Display for Word<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "(x, y, z)");
        }
        let parts: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" ; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn beta_at_a_point() {
        let q = Rationals;
        let p = [q.zero(), q.zero(), q.one()];
        assert_eq!(Atom::Beta.eval(&q, &p), [q.zero(), q.one(), q.one()]);
        let p = [q.from_i64(1), q.from_i64(2), q.from_i64(3)];
        assert_eq!(Atom::Pi.eval(&q, &p), [q.from_i64(2), q.from_i64(1), q.from_i64(3)]);
    }

    #[test]
    fn pi_beta_images() {
        let q = Rationals;
        let w = Word::new(&q, vec![Atom::Pi, Atom::Beta]);
        assert_eq!(w.apply(&Polynomial::y(&q), Budget::UNLIMITED).unwrap(), beta_components(&q)[0]);
        assert_eq!(w.apply(&Polynomial::x(&q), Budget::UNLIMITED).unwrap().to_string(), "y + z^2");
        let p = Polynomial::x(&q);
        assert_eq!(Word::empty(&q).apply(&p, Budget::UNLIMITED).unwrap(), p);
    }

    #[test]
    fn theta_layout() {
        let q = Rationals;
        let t = Word::theta(&q, 3);
        assert_eq!(t.len(), 13);
        assert_eq!(Word::theta(&q, 1).to_string(), "pi ; beta ; pi ; beta_inv ; pi");
    }

    #[test]
    fn reductions() {
        let q = Rationals;
        assert!(Word::new(&q, vec![Atom::Pi, Atom::Pi]).free_reduce().is_empty());
        assert!(Word::new(&q, vec![Atom::Beta, Atom::Pi, Atom::Pi, Atom::BetaInv]).free_reduce().is_empty());
        for n in 1..=4 {
            let t = Word::theta(&q, n);
            assert!(t.clone().then(&t).free_reduce().is_empty(), "N = {n}");
        }
        let a = AffineMap::from_i64(&q, [[2, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 0, 0]).unwrap();
        let w = Word::new(&q, vec![Atom::Affine(a.clone()), Atom::Affine(a.inverse()), Atom::Beta]);
        assert_eq!(w.free_reduce().atoms(), &[Atom::Beta]);
        let w = Word::new(&q, vec![Atom::Pi, Atom::Affine(a.clone())]);
        assert_eq!(w.free_reduce().atoms(), &[Atom::Affine(AffineMap::pi(&q).compose(&a))]);
    }

    #[test]
    fn theta_one_squared_expands_to_identity() {
        let f = PrimeField::new(101).unwrap();
        let t = Word::theta(&f, 1);
        let tt = t.clone().then(&t);
        assert!(tt.to_endomorphism(Budget::UNLIMITED).unwrap().is_identity());
        assert_eq!(tt.apply(&Polynomial::x(&f), Budget::UNLIMITED).unwrap(), Polynomial::x(&f));
    }

    #[test]
    fn beta_squared() {
        let q = Rationals;
        let bb = Word::new(&q, vec![Atom::Beta, Atom::Beta]);
        assert!(!bb.to_endomorphism(Budget::UNLIMITED).unwrap().is_identity());
        let f2 = PrimeField::new(2).unwrap();
        let bb = Word::new(&f2, vec![Atom::Beta, Atom::Beta]);
        assert!(bb.to_endomorphism(Budget::UNLIMITED).unwrap().is_identity());
    }

    #[test]
    fn eval_agrees_with_eager_expansion() {
        let f = PrimeField::new(101).unwrap();
        let a = AffineMap::from_i64(&f, [[1, 2, 0], [3, 1, 0], [0, 5, 1]], [4, 0, 9]).unwrap();
        let w = Word::new(&f, vec![Atom::Pi, Atom::Beta, Atom::Affine(a), Atom::BetaInv]);
        let e = w.to_endomorphism(Budget::UNLIMITED).unwrap();
        for p in [[1u64, 2, 3], [0, 0, 0], [100, 50, 7]] {
            assert_eq!(w.eval(&p), e.eval(&p));
        }
    }
}
