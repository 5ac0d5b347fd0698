//! The affine chain `A0 > A1 > A2 > A3 > A4`.
//!
//! `A1` is the triangular affine maps, `A2 = {(u^8 x + b y + c z + d, u^2 y, u z)}`,
//! `A3` is `A2` with `b = 0`, and `A4 = {(u^2 x, u^2 y, u z) | u^6 = 1}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::affine::AffineMap;
use crate::endomorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::field::{BaseField, Field, SampleRng};

/// One cell of the partition induced by the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Stratum {
    #[serde(rename = "A0A1")]
    A0A1,
    #[serde(rename = "A1A2")]
    A1A2,
    #[serde(rename = "A2A3")]
    A2A3,
    #[serde(rename = "A3A4")]
    A3A4,
    #[serde(rename = "A4")]
    A4,
    #[serde(rename = "not-affine")]
    NotAffine,
}

impl Stratum {
    pub const LEVELS: [Stratum; 4] = [Stratum::A0A1, Stratum::A1A2, Stratum::A2A3, Stratum::A3A4];

    pub fn name(&self) -> &'static str {
        match self {
            Stratum::A0A1 => "A0A1",
            Stratum::A1A2 => "A1A2",
            Stratum::A2A3 => "A2A3",
            Stratum::A3A4 => "A3A4",
            Stratum::A4 => "A4",
            Stratum::NotAffine => "not-affine",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stratum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "A0A1" => Stratum::A0A1,
            "A1A2" => Stratum::A1A2,
            "A2A3" => Stratum::A2A3,
            "A3A4" => Stratum::A3A4,
            "A4" => Stratum::A4,
            _ => return Err(Error::InvalidParameter(format!("unknown stratum `{s}`"))),
        })
    }
}

/// Parameters of `(u^8 x + b y + c z + d, u^2 y, u z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A2Params<E> {
    pub u: E,
    pub b: E,
    pub c: E,
    pub d: E,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumLabel<E> {
    pub stratum: Stratum,
    /// Present exactly for `A2A3`, `A3A4` and `A4`.
    pub params: Option<A2Params<E>>,
}

/// Extracts `(u, b, c, d)` when `a` lies in `A2`.
fn a2_params<K: Field>(a: &AffineMap<K>) -> Option<A2Params<K::Elem>> {
    let f = a.field();
    let m = a.matrix();
    let t = a.translation();
    if !a.is_triangular() || !f.is_zero(&m[1][2]) || !f.is_zero(&t[1]) || !f.is_zero(&t[2]) {
        return None;
    }
    let u = m[2][2].clone();
    let u2 = f.mul(&u, &u);
    if m[1][1] != u2 || m[0][0] != f.pow(&u, 8) {
        return None;
    }
    Some(A2Params { u, b: m[0][1].clone(), c: m[0][2].clone(), d: t[0].clone() })
}

pub fn classify<K: Field>(a: &AffineMap<K>) -> StratumLabel<K::Elem> {
    let f = a.field();
    if !a.is_triangular() {
        return StratumLabel { stratum: Stratum::A0A1, params: None };
    }
    let Some(p) = a2_params(a) else {
        return StratumLabel { stratum: Stratum::A1A2, params: None };
    };
    let stratum = if !f.is_zero(&p.b) {
        Stratum::A2A3
    } else if f.is_zero(&p.c) && f.is_zero(&p.d) && f.is_one(&f.pow(&p.u, 6)) {
        Stratum::A4
    } else {
        Stratum::A3A4
    };
    StratumLabel { stratum, params: Some(p) }
}

/// Classifies an endomorphism, reporting `NotAffine` for higher degree.
pub fn classify_endomorphism<K: Field>(e: &Endomorphism<K>) -> StratumLabel<K::Elem> {
    match AffineMap::from_endomorphism(e) {
        Ok(a) => classify(&a),
        Err(_) => StratumLabel { stratum: Stratum::NotAffine, params: None },
    }
}

/// `(u^8 x + b y + c z + d, u^2 y, u z)`.
pub fn a2_map<K: Field>(field: &K, p: &A2Params<K::Elem>) -> Result<AffineMap<K>> {
    let f = field;
    let z = f.zero();
    AffineMap::new(
        f,
        [
            [f.pow(&p.u, 8), p.b.clone(), p.c.clone()],
            [z.clone(), f.mul(&p.u, &p.u), z.clone()],
            [z.clone(), z.clone(), p.u.clone()],
        ],
        [p.d.clone(), z.clone(), z],
    )
}

/// All `u` with `u^6 = 1`.
pub fn sixth_roots<K: BaseField>(field: &K) -> Vec<K::Elem> {
    field.roots_of_unity(6)
}

/// The maps `(u^2 x, u^2 y, u z)` for every sixth root of unity `u`.
pub fn centralizer_elements<K: BaseField>(field: &K) -> Vec<AffineMap<K>> {
    sixth_roots(field)
        .into_iter()
        .map(|u| {
            let u2 = field.mul(&u, &u);
            AffineMap::diagonal(field, [u2.clone(), u2, u]).expect("roots of unity are units")
        })
        .collect()
}

/// A random affine map in the given stratum (`A0A1` through `A4`).
pub fn random_in_stratum<K: BaseField>(field: &K, stratum: Stratum, rng: &mut SampleRng) -> AffineMap<K> {
    let f = field;
    loop {
        let candidate = match stratum {
            Stratum::A0A1 | Stratum::NotAffine => AffineMap::random(f, rng),
            Stratum::A1A2 => {
                let z = f.zero();
                let m = [
                    [f.random_nonzero(rng), f.random_elem(rng), f.random_elem(rng)],
                    [z.clone(), f.random_nonzero(rng), f.random_elem(rng)],
                    [z.clone(), z, f.random_nonzero(rng)],
                ];
                let t = std::array::from_fn(|_| f.random_elem(rng));
                AffineMap::new(f, m, t).expect("nonzero diagonal")
            }
            Stratum::A2A3 | Stratum::A3A4 | Stratum::A4 => {
                let u = if stratum == Stratum::A4 {
                    let roots = sixth_roots(f);
                    roots[rng.gen_range(0..roots.len())].clone()
                } else {
                    f.random_nonzero(rng)
                };
                let (b, c, d) = match stratum {
                    Stratum::A2A3 => (f.random_nonzero(rng), f.random_elem(rng), f.random_elem(rng)),
                    Stratum::A3A4 => (f.zero(), f.random_elem(rng), f.random_elem(rng)),
                    _ => (f.zero(), f.zero(), f.zero()),
                };
                a2_map(f, &A2Params { u, b, c, d }).expect("u is a unit")
            }
        };
        if stratum == Stratum::NotAffine || classify(&candidate).stratum == stratum {
            return candidate;
        }
    }
}
