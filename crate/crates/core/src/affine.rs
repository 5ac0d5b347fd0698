//! Invertible affine maps of `K^3`, stored as matrix plus translation.
//!
//! Row `r` holds the `r`-th component: `(x_r)alpha = sum_c m[r][c] x_c + t[r]`.

use std::fmt;

use crate::endomorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::field::{BaseField, Field, SampleRng};
use crate::monomial::Monomial;
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap<K: Field> {
    field: K,
    m: [[K::Elem; 3]; 3],
    t: [K::Elem; 3],
}

impl<K: Field> AffineMap<K> {
    pub fn new(field: &K, m: [[K::Elem; 3]; 3], t: [K::Elem; 3]) -> Result<Self> {
        let a = AffineMap { field: field.clone(), m, t };
        if field.is_zero(&a.det()) {
            return Err(Error::NotInvertible("affine map with singular matrix".into()));
        }
        Ok(a)
    }

    /// Builds from small integer entries.
    pub fn from_i64(field: &K, m: [[i64; 3]; 3], t: [i64; 3]) -> Result<Self> {
        Self::new(field, m.map(|row| row.map(|v| field.from_i64(v))), t.map(|v| field.from_i64(v)))
    }

    pub fn identity(field: &K) -> Self {
        Self::diagonal(field, [field.one(), field.one(), field.one()]).expect("identity is invertible")
    }

    pub fn pi(field: &K) -> Self {
        Self::from_i64(field, [[0, 1, 0], [1, 0, 0], [0, 0, 1]], [0, 0, 0]).expect("pi is invertible")
    }

    pub fn diagonal(field: &K, d: [K::Elem; 3]) -> Result<Self> {
        let z = field.zero();
        let [a, b, c] = d;
        Self::new(
            field,
            [[a, z.clone(), z.clone()], [z.clone(), b, z.clone()], [z.clone(), z.clone(), c]],
            [z.clone(), z.clone(), z],
        )
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn matrix(&self) -> &[[K::Elem; 3]; 3] {
        &self.m
    }

    pub fn translation(&self) -> &[K::Elem; 3] {
        &self.t
    }

    pub fn det(&self) -> K::Elem {
        let f = &self.field;
        let m = &self.m;
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
            f.sub(&f.mul(&m[r1][c1], &m[r2][c2]), &f.mul(&m[r1][c2], &m[r2][c1]))
        };
        let t0 = f.mul(&m[0][0], &minor(1, 2, 1, 2));
        let t1 = f.mul(&m[0][1], &minor(1, 2, 0, 2));
        let t2 = f.mul(&m[0][2], &minor(1, 2, 0, 1));
        f.add(&f.sub(&t0, &t1), &t2)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.field)
    }

    /// Upper triangular matrix, i.e. a member of the triangular subgroup.
    pub fn is_triangular(&self) -> bool {
        let f = &self.field;
        f.is_zero(&self.m[1][0]) && f.is_zero(&self.m[2][0]) && f.is_zero(&self.m[2][1])
    }

    /// `self` followed by `other` in the right-action convention:
    /// `(P)(self . other) = ((P)self)other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "affine maps over different fields");
        let f = &self.field;
        let m = std::array::from_fn(|r| {
            std::array::from_fn(|c| (0..3).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&self.m[r][k], &other.m[k][c]))))
        });
        let t = std::array::from_fn(|r| {
            (0..3).fold(self.t[r].clone(), |acc, k| f.add(&acc, &f.mul(&self.m[r][k], &other.t[k])))
        });
        AffineMap { field: f.clone(), m, t }
    }

    pub fn inverse(&self) -> Self {
        let f = &self.field;
        let m = &self.m;
        let d_inv = f.inv(&self.det()).expect("stored affine maps are invertible");
        let cof = |r: usize, c: usize| {
            let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
            let cols: Vec<usize> = (0..3).filter(|&x| x != c).collect();
            let minor = f.sub(
                &f.mul(&m[rows[0]][cols[0]], &m[rows[1]][cols[1]]),
                &f.mul(&m[rows[0]][cols[1]], &m[rows[1]][cols[0]]),
            );
            if (r + c).is_multiple_of(2) {
                minor
            } else {
                f.neg(&minor)
            }
        };
        // inverse = adjugate / det, adjugate = transposed cofactors
        let inv: [[K::Elem; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| f.mul(&cof(c, r), &d_inv)));
        let t = std::array::from_fn(|r| {
            let s = (0..3).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&inv[r][k], &self.t[k])));
            f.neg(&s)
        });
        AffineMap { field: f.clone(), m: inv, t }
    }

    /// The map as a function `K^3 -> K^3`.
    pub fn eval(&self, p: &[K::Elem; 3]) -> [K::Elem; 3] {
        let f = &self.field;
        std::array::from_fn(|r| (0..3).fold(self.t[r].clone(), |acc, c| f.add(&acc, &f.mul(&self.m[r][c], &p[c]))))
    }

    pub fn component(&self, r: usize) -> Polynomial<K> {
        let f = &self.field;
        let mut terms: Vec<(Monomial, K::Elem)> = (0..3).map(|c| (Monomial::var(c), self.m[r][c].clone())).collect();
        terms.push((Monomial::ONE, self.t[r].clone()));
        Polynomial::from_terms(f, terms)
    }

    pub fn to_endomorphism(&self) -> Endomorphism<K> {
        Endomorphism::new(std::array::from_fn(|r| self.component(r)))
    }

    /// Reads an endomorphism whose components have total degree at most one.
    pub fn from_endomorphism(e: &Endomorphism<K>) -> Result<Self> {
        let f = e.field();
        let mut m = std::array::from_fn(|_| std::array::from_fn(|_| f.zero()));
        let mut t = std::array::from_fn(|_| f.zero());
        for (r, comp) in e.components().iter().enumerate() {
            for (v, c) in comp.terms() {
                match v.total_degree() {
                    0 => t[r] = c.clone(),
                    1 => {
                        let idx = v.exps().iter().position(|e| *e == 1).expect("degree-one monomial");
                        m[r][idx] = c.clone();
                    }
                    _ => return Err(Error::NotAffine(format!("component {} has degree {}", r + 1, v.total_degree()))),
                }
            }
        }
        Self::new(f, m, t)
    }

    pub fn map_field<E: Field>(&self, target: &E, f: impl Fn(&K::Elem) -> Option<E::Elem>) -> Option<AffineMap<E>> {
        let mut m = Vec::with_capacity(9);
        for row in &self.m {
            for v in row {
                m.push(f(v)?);
            }
        }
        let t = [f(&self.t[0])?, f(&self.t[1])?, f(&self.t[2])?];
        let mut it = m.into_iter();
        let m = std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("nine entries")));
        AffineMap::new(target, m, t).ok()
    }
}

impl<K: BaseField> AffineMap<K> {
    /// A uniformly drawn invertible affine map.
    pub fn random(field: &K, rng: &mut SampleRng) -> Self {
        loop {
            let m = std::array::from_fn(|_| std::array::from_fn(|_| field.random_elem(rng)));
            let t = std::array::from_fn(|_| field.random_elem(rng));
            if let Ok(a) = Self::new(field, m, t) {
                return a;
            }
        }
    }
}

impl<K: Field> fmt::Display for AffineMap<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.component(0), self.component(1), self.component(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use rand::SeedableRng;

    #[test]
    fn inverse_examples() {
        let q = Rationals;
        let pi = AffineMap::pi(&q);
        assert_eq!(pi.inverse(), pi);
        let d = AffineMap::from_i64(&q, [[2, 0, 0], [0, 2, 0], [0, 0, 1]], [0, 0, 0]).unwrap();
        assert_eq!(d.inverse().to_string(), "(1/2*x, 1/2*y, z)");
    }

    #[test]
    fn singular_matrix_rejected() {
        let q = Rationals;
        assert!(AffineMap::from_i64(&q, [[1, 1, 0], [2, 2, 0], [0, 0, 1]], [0, 0, 0]).is_err());
    }

    #[test]
    fn random_maps_invert_both_sides() {
        for p in [2u64, 7, 101] {
            let f = PrimeField::new(p).unwrap();
            let mut rng = SampleRng::seed_from_u64(p);
            for _ in 0..20 {
                let a = AffineMap::random(&f, &mut rng);
                assert!(a.compose(&a.inverse()).is_identity());
                assert!(a.inverse().compose(&a).is_identity());
            }
        }
    }

    #[test]
    fn endomorphism_round_trip() {
        let q = Rationals;
        let a = AffineMap::from_i64(&q, [[1, 2, 3], [0, 4, 5], [0, 0, 7]], [1, 6, 8]).unwrap();
        assert_eq!(a.to_string(), "(x + 2*y + 3*z + 1, 4*y + 5*z + 6, 7*z + 8)");
        assert_eq!(AffineMap::from_endomorphism(&a.to_endomorphism()).unwrap(), a);
        assert!(a.is_triangular());
        assert!(!AffineMap::pi(&q).is_triangular());
    }

    #[test]
    fn composition_matches_substitution() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = SampleRng::seed_from_u64(3);
        let a = AffineMap::random(&f, &mut rng);
        let b = AffineMap::random(&f, &mut rng);
        let eager = a.to_endomorphism().compose(&b.to_endomorphism(), crate::poly::Budget::UNLIMITED).unwrap();
        assert_eq!(eager, a.compose(&b).to_endomorphism());
    }
}
