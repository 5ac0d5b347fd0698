//! Polynomial endomorphisms of `K^3` as explicit component triples.

use std::fmt;

use crate::degree::{DegreeFn, DegreeValue};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::monomial::Monomial;
use crate::poly::{Budget, Polynomial};

/// `(phi_1, phi_2, phi_3)` with `(x)phi = phi_1`, `(y)phi = phi_2`,
/// `(z)phi = phi_3`, acting on the right: `(P)phi = P(phi_1, phi_2, phi_3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism<K: Field> {
    comps: [Polynomial<K>; 3],
}

impl<K: Field> Endomorphism<K> {
    pub fn new(comps: [Polynomial<K>; 3]) -> Self {
        assert!(
            comps[0].field() == comps[1].field() && comps[1].field() == comps[2].field(),
            "components over different fields"
        );
        Endomorphism { comps }
    }

    pub fn identity(field: &K) -> Self {
        Endomorphism::new([Polynomial::x(field), Polynomial::y(field), Polynomial::z(field)])
    }

    pub fn field(&self) -> &K {
        self.comps[0].field()
    }

    pub fn components(&self) -> &[Polynomial<K>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Polynomial<K>; 3] {
        self.comps
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field())
    }

    /// `(P)self`.
    pub fn apply(&self, p: &Polynomial<K>, budget: Budget) -> Result<Polynomial<K>> {
        p.substitute([&self.comps[0], &self.comps[1], &self.comps[2]], budget)
    }

    /// `self` followed by `other`: components `(phi_r)psi`.
    pub fn compose(&self, other: &Self, budget: Budget) -> Result<Self> {
        let comps = [
            other.apply(&self.comps[0], budget)?,
            other.apply(&self.comps[1], budget)?,
            other.apply(&self.comps[2], budget)?,
        ];
        Ok(Endomorphism { comps })
    }

    pub fn eval(&self, p: &[K::Elem; 3]) -> [K::Elem; 3] {
        std::array::from_fn(|r| self.comps[r].eval(p))
    }

    /// Component-wise degrees.
    pub fn degrees(&self, deg: &DegreeFn) -> [DegreeValue; 3] {
        std::array::from_fn(|r| deg.eval(&self.comps[r]))
    }

    /// Largest total degree of a component.
    pub fn total_degree(&self) -> Option<u64> {
        self.comps.iter().filter_map(|c| c.total_degree()).max()
    }

    pub fn is_affine(&self) -> bool {
        self.total_degree().is_some_and(|d| d <= 1)
    }

    /// Triangular shape `(a x + f(y,z), b y + g(z), c z + d)` with
    /// `a, b, c` nonzero; returns `(a, b, c)`.
    pub fn triangular_diagonal(&self) -> Result<[K::Elem; 3]> {
        let mut diag = Vec::with_capacity(3);
        for (r, comp) in self.comps.iter().enumerate() {
            let lead = Monomial::var(r);
            let mut coeff = None;
            for (v, c) in comp.terms() {
                let exps = v.exps();
                if exps[..r].iter().any(|e| *e > 0) {
                    return Err(Error::NotTriangular(format!("component {} involves an earlier variable", r + 1)));
                }
                if exps[r] > 0 {
                    if *v != lead {
                        return Err(Error::NotTriangular(format!(
                            "component {} is not linear in its own variable",
                            r + 1
                        )));
                    }
                    coeff = Some(c.clone());
                }
            }
            diag.push(
                coeff.ok_or_else(|| Error::NotTriangular(format!("component {} misses its own variable", r + 1)))?,
            );
        }
        Ok(diag.try_into().expect("three entries"))
    }

    pub fn is_triangular(&self) -> bool {
        self.triangular_diagonal().is_ok()
    }

    /// Inverse of a triangular map by back-substitution from the last
    /// variable: `S3 = (z - d)/c`, `S2 = (y - g(S3))/b`, `S1 = (x - f(S2,S3))/a`.
    pub fn triangular_inverse(&self) -> Result<Self> {
        let field = self.field().clone();
        let [a, b, c] = self.triangular_diagonal()?;
        let inv = |e: &K::Elem| field.inv(e).expect("triangular diagonal is nonzero");
        let zero = Polynomial::zero(&field);
        let tail = |r: usize| {
            let lead = Monomial::var(r);
            Polynomial::from_terms(&field, self.comps[r].terms().iter().filter(|t| t.0 != lead).cloned())
        };
        let s3 = (&Polynomial::z(&field) - &tail(2)).scale(&inv(&c));
        let g = tail(1).substitute([&zero, &zero, &s3], Budget::UNLIMITED)?;
        let s2 = (&Polynomial::y(&field) - &g).scale(&inv(&b));
        let f = tail(0).substitute([&zero, &s2, &s3], Budget::UNLIMITED)?;
        let s1 = (&Polynomial::x(&field) - &f).scale(&inv(&a));
        Ok(Endomorphism::new([s1, s2, s3]))
    }

    pub fn map_field<E: Field>(&self, target: &E, f: impl Fn(&K::Elem) -> Option<E::Elem>) -> Option<Endomorphism<E>> {
        Some(Endomorphism::new([
            self.comps[0].map_field(target, &f)?,
            self.comps[1].map_field(target, &f)?,
            self.comps[2].map_field(target, &f)?,
        ]))
    }

    /// Total number of terms over the three components.
    pub fn term_count(&self) -> usize {
        self.comps.iter().map(Polynomial::len).sum()
    }
}

impl<K: Field> fmt::Display for Endomorphism<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.comps[0], self.comps[1], self.comps[2])
    }
}
