use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent vector `(i, j, k)` of the monomial `x^i y^j z^k`.
///
/// The derived order is lexicographic in `(i, j, k)`, which is the first
/// cyclic lexicographic order `>_1`. Polynomials keep their terms sorted
/// descending under it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { i: 0, j: 0, k: 0 };
    pub const X: Monomial = Monomial { i: 1, j: 0, k: 0 };
    pub const Y: Monomial = Monomial { i: 0, j: 1, k: 0 };
    pub const Z: Monomial = Monomial { i: 0, j: 0, k: 1 };

    pub const fn new(i: u32, j: u32, k: u32) -> Self {
        Monomial { i, j, k }
    }

    /// Exponent vector of the `var`-th coordinate (0 = x, 1 = y, 2 = z).
    pub fn var(var: usize) -> Self {
        let mut e = [0; 3];
        e[var] = 1;
        Monomial::from(e)
    }

    pub fn exps(&self) -> [u32; 3] {
        [self.i, self.j, self.k]
    }

    pub fn checked_add(&self, other: &Monomial) -> Result<Monomial> {
        Ok(Monomial {
            i: self.i.checked_add(other.i).ok_or(Error::ExponentOverflow)?,
            j: self.j.checked_add(other.j).ok_or(Error::ExponentOverflow)?,
            k: self.k.checked_add(other.k).ok_or(Error::ExponentOverflow)?,
        })
    }

    /// `e * self`, componentwise.
    pub fn checked_scale(&self, e: u32) -> Result<Monomial> {
        Ok(Monomial {
            i: self.i.checked_mul(e).ok_or(Error::ExponentOverflow)?,
            j: self.j.checked_mul(e).ok_or(Error::ExponentOverflow)?,
            k: self.k.checked_mul(e).ok_or(Error::ExponentOverflow)?,
        })
    }

    /// Unchecked addition; callers bound the exponents beforehand.
    #[inline]
    pub(crate) fn add_unchecked(&self, other: &Monomial) -> Monomial {
        Monomial { i: self.i + other.i, j: self.j + other.j, k: self.k + other.k }
    }

    pub fn total_degree(&self) -> u64 {
        self.i as u64 + self.j as u64 + self.k as u64
    }

    pub fn dot(&self, w: [u64; 3]) -> u64 {
        self.i as u64 * w[0] + self.j as u64 * w[1] + self.k as u64 * w[2]
    }

    /// Componentwise `<=`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.i <= other.i && self.j <= other.j && self.k <= other.k
    }
}

impl From<[u32; 3]> for Monomial {
    fn from(e: [u32; 3]) -> Self {
        Monomial { i: e[0], j: e[1], k: e[2] }
    }
}

impl From<(u32, u32, u32)> for Monomial {
    fn from((i, j, k): (u32, u32, u32)) -> Self {
        Monomial { i, j, k }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.i, self.j, self.k).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_first_cyclic_lex() {
        assert!(Monomial::X > Monomial::new(0, 9, 9));
        assert!(Monomial::new(0, 1, 0) > Monomial::new(0, 0, 5));
    }

    #[test]
    fn overflow_is_detected() {
        let big = Monomial::new(u32::MAX, 0, 0);
        assert_eq!(big.checked_add(&Monomial::X), Err(Error::ExponentOverflow));
        assert!(big.checked_add(&Monomial::Y).is_ok());
        assert_eq!(big.checked_scale(2), Err(Error::ExponentOverflow));
    }
}
