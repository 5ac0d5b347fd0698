//! Exact coefficient fields.
//!
//! Two base regimes are supported: the rationals (arbitrary precision) and
//! prime fields `F_p` with `p < 2^32`, so that a product of two reduced
//! residues fits in a `u64` before reduction. [`GaloisField`] provides
//! `F_{p^k}` and is only used to evaluate maps at points of a large field.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Seeded generator used for every random choice in the crate.
pub type SampleRng = ChaCha8Rng;

/// Largest prime below `2^32`; the reduction target for rational evaluation.
pub const LARGE_PRIME: u64 = 4_294_967_291;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "fp={p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `q` or `fp=PRIME`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("fp=")
            .and_then(|rest| rest.parse::<u64>().ok())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown field `{s}` (use q or fp=PRIME)")))?;
        PrimeField::new(p)?;
        Ok(FieldSpec::Prime(p))
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A field with exact arithmetic. Elements are plain values; the field
/// object carries whatever context (the modulus) the operations need.
// Conversions take `&self` because elements only make sense in a field.
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    /// Canonical text of an element: a decimal integer or `a/b`.
    fn format_elem(&self, a: &Self::Elem) -> String;

    fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    /// `num/den`, or `None` when `den` vanishes in the field.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<Self::Elem> {
        let d = self.inv(&self.from_bigint(den))?;
        Some(self.mul(&self.from_bigint(num), &d))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        Some(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// The fields a user can choose: the rationals and prime fields.
pub trait BaseField: Field {
    /// A random element; rationals draw small integers with occasional fractions.
    fn random_elem(&self, rng: &mut SampleRng) -> Self::Elem;

    fn random_nonzero(&self, rng: &mut SampleRng) -> Self::Elem {
        loop {
            let a = self.random_elem(rng);
            if !self.is_zero(&a) {
                return a;
            }
        }
    }

    /// All `u` with `u^order = 1`, in a deterministic order starting with 1.
    fn roots_of_unity(&self, order: u64) -> Vec<Self::Elem>;

    /// Image under reduction modulo `p`; `None` if a denominator vanishes
    /// or the characteristic differs.
    fn reduce_mod(&self, a: &Self::Elem, p: u64) -> Option<u64>;

    /// A large field into which this field reduces, used for pointwise
    /// comparisons of polynomial maps (`F_{p^k}` for a prime field, `F_q`
    /// with `q` a large prime for the rationals).
    fn evaluation_field(&self) -> GaloisField;
}

// ---------------------------------------------------------------------------
// Rationals

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    // Integer fast paths skip the gcd normalization, which dominates
    // substitution over the rationals.
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() + b.numer());
        }
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() - b.numer());
        }
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() * b.numer());
        }
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<BigRational> {
        (!den.is_zero()).then(|| BigRational::new(num.clone(), den.clone()))
    }
    fn format_elem(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

impl BaseField for Rationals {
    fn random_elem(&self, rng: &mut SampleRng) -> BigRational {
        let num = BigInt::from(rng.gen_range(-9i64..=9));
        if rng.gen_ratio(1, 20) {
            let den = BigInt::from(rng.gen_range(2i64..=5));
            BigRational::new(num, den)
        } else {
            BigRational::from_integer(num)
        }
    }

    fn roots_of_unity(&self, order: u64) -> Vec<BigRational> {
        if order.is_multiple_of(2) {
            vec![self.one(), -self.one()]
        } else {
            vec![self.one()]
        }
    }

    fn reduce_mod(&self, a: &BigRational, p: u64) -> Option<u64> {
        let pb = BigInt::from(p);
        let num = a.numer().mod_floor(&pb).to_u64()?;
        let den = a.denom().mod_floor(&pb).to_u64()?;
        let f = PrimeField::new_unchecked(p);
        f.inv(&den).map(|d| f.mul(&num, &d))
    }

    fn evaluation_field(&self) -> GaloisField {
        GaloisField::new(LARGE_PRIME, 1)
    }
}

// ---------------------------------------------------------------------------
// Prime fields

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(PrimeField { p })
    }

    fn new_unchecked(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        Some(self.pow(a, self.p - 2))
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits in u64")
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn format_elem(&self, a: &u64) -> String {
        // symmetric representative keeps `-1` readable
        if *a > self.p / 2 {
            format!("-{}", self.p - a)
        } else {
            a.to_string()
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl BaseField for PrimeField {
    fn random_elem(&self, rng: &mut SampleRng) -> u64 {
        rng.gen_range(0..self.p)
    }

    fn roots_of_unity(&self, order: u64) -> Vec<u64> {
        let g = order.gcd(&(self.p - 1));
        if g == 1 {
            return vec![1];
        }
        let cofactor = (self.p - 1) / g;
        let factors = prime_factors(g);
        // an element of exact order g generates all g-th roots
        let generator = (2..self.p)
            .map(|a| self.pow(&a, cofactor))
            .find(|h| factors.iter().all(|q| self.pow(h, g / q) != 1))
            .expect("F_p^* is cyclic");
        let mut roots: Vec<u64> =
            std::iter::successors(Some(1u64), |r| Some(self.mul(r, &generator))).take(g as usize).collect();
        roots.sort_unstable();
        roots
    }

    fn reduce_mod(&self, a: &u64, p: u64) -> Option<u64> {
        (p == self.p).then_some(*a)
    }

    fn evaluation_field(&self) -> GaloisField {
        // |F_{p^k}| >= 2^48 keeps Schwartz-Zippel failure negligible for
        // maps of degree below 2^20
        let bits = 64 - self.p.leading_zeros() as u64 - 1;
        let bits = bits.max(1);
        let k = 48u64.div_ceil(bits).max(1);
        GaloisField::new(self.p, k as usize)
    }
}

// ---------------------------------------------------------------------------
// Extension fields F_{p^k}

/// `F_p[t] / (f)` with `f` monic irreducible of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaloisField {
    p: u64,
    k: usize,
    /// Monic modulus, coefficients from low to high degree (length `k + 1`).
    modulus: Vec<u64>,
}

mod upoly {
    //! Dense univariate polynomials over F_p, low degree first.
    use super::PrimeField;
    use crate::field::Field;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder modulo a nonzero polynomial.
    pub fn rem(f: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = f.inv(&m[dm]).expect("nonzero leading coefficient");
        while r.len() > dm {
            let top = r.len() - 1;
            let c = f.mul(&r[top], &lead_inv);
            let shift = top - dm;
            for (t, mt) in m.iter().enumerate() {
                r[shift + t] = f.sub(&r[shift + t], &f.mul(&c, mt));
            }
            trim(&mut r);
        }
        r
    }

    pub fn gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow_mod(f: &PrimeField, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(f, base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(f, &mul(f, &acc, &b), m);
            }
            e >>= 1;
            if e > 0 {
                b = rem(f, &mul(f, &b, &b), m);
            }
        }
        acc
    }

    /// Ben-Or: monic `m` of degree k is irreducible iff
    /// gcd(m, t^(p^i) - t) = 1 for 1 <= i <= k/2.
    pub fn is_irreducible(f: &PrimeField, m: &[u64]) -> bool {
        let k = m.len() - 1;
        let t = vec![0u64, 1];
        let mut h = t.clone();
        for _ in 0..k / 2 {
            h = pow_mod(f, &h, f.modulus(), m);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = f.sub(&diff[1], &1);
            trim(&mut diff);
            let g = gcd(f, m, &diff);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl GaloisField {
    /// Builds `F_{p^k}` with a deterministically chosen irreducible modulus.
    pub fn new(p: u64, k: usize) -> Self {
        assert!(k >= 1);
        let base = PrimeField::new(p).expect("prime modulus");
        if k == 1 {
            return GaloisField { p, k, modulus: vec![0, 1] };
        }
        let mut rng = SampleRng::seed_from_u64(p ^ ((k as u64) << 40));
        loop {
            let mut m: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
            m.push(1);
            if m[0] != 0 && upoly::is_irreducible(&base, &m) {
                return GaloisField { p, k, modulus: m };
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn base(&self) -> PrimeField {
        PrimeField::new_unchecked(self.p)
    }

    /// Embeds a residue of the prime subfield.
    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.k];
        v[0] = a % self.p;
        v
    }

    pub fn random_elem(&self, rng: &mut SampleRng) -> Vec<u64> {
        (0..self.k).map(|_| rng.gen_range(0..self.p)).collect()
    }

    fn order(&self) -> u128 {
        (self.p as u128).pow(self.k as u32)
    }
}

impl Field for GaloisField {
    type Elem = Vec<u64>;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> Vec<u64> {
        vec![0; self.k]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|c| *c == 0)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let f = self.base();
        a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let f = self.base();
        a.iter().zip(b).map(|(x, y)| f.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        let f = self.base();
        a.iter().map(|x| f.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let f = self.base();
        if self.k == 1 {
            return vec![f.mul(&a[0], &b[0])];
        }
        let mut r = upoly::rem(&f, &upoly::mul(&f, a, b), &self.modulus);
        r.resize(self.k, 0);
        r
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        let mut e = self.order() - 2;
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        Some(acc)
    }
    fn from_bigint(&self, v: &BigInt) -> Vec<u64> {
        self.embed(self.base().from_bigint(v))
    }
    fn format_elem(&self, a: &Vec<u64>) -> String {
        if self.k == 1 {
            return self.base().format_elem(&a[0]);
        }
        let parts: Vec<String> = a.iter().map(u64::to_string).collect();
        format!("[{}]", parts.join(","))
    }
}
