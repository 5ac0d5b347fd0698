//! Lattice regions `P_{m,n}`, `Q_{m,n}` and their starred subsets.
//!
//! ```text
//! P_{m,n}: 4i + j <= 4m,  4i + k <= 4m + n,  8i + 2j + k <= 8m + n
//! Q_{m,n}: i + j <= m,    3i + 3j + k <= 3m + n
//! ```
//!
//! `P*_{m,n}` holds the polynomials supported in `P_{m,n}` with
//! `ldeg_2 = (0,4m,n)` and `ldeg_3 = (0,2m,4m+n)`; `Q*_{m,n}` those supported
//! in `Q_{m,n}` with `ldeg_2 = (0,m,n)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use rand::Rng;
use serde::Serialize;

use crate::degree::ldeg;
use crate::error::{Error, Result};
use crate::field::{BaseField, Field, SampleRng};
use crate::monomial::Monomial;
use crate::poly::{Budget, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RegionParams {
    pub m: u64,
    pub n: u64,
}

impl RegionParams {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("region parameter m must be at least 1".into()));
        }
        Ok(RegionParams { m, n })
    }
}

impl fmt::Display for RegionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RegionKind {
    P,
    Q,
    #[serde(rename = "P*")]
    Pstar,
    #[serde(rename = "Q*")]
    Qstar,
}

impl RegionKind {
    /// The lattice region underlying a starred kind.
    pub fn base(&self) -> RegionKind {
        match self {
            RegionKind::P | RegionKind::Pstar => RegionKind::P,
            RegionKind::Q | RegionKind::Qstar => RegionKind::Q,
        }
    }

    pub fn starred(&self) -> RegionKind {
        match self {
            RegionKind::P | RegionKind::Pstar => RegionKind::Pstar,
            RegionKind::Q | RegionKind::Qstar => RegionKind::Qstar,
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::P => "P",
            RegionKind::Q => "Q",
            RegionKind::Pstar => "P*",
            RegionKind::Qstar => "Q*",
        })
    }
}

impl FromStr for RegionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "P" | "p" => RegionKind::P,
            "Q" | "q" => RegionKind::Q,
            "P*" | "Pstar" | "pstar" => RegionKind::Pstar,
            "Q*" | "Qstar" | "qstar" => RegionKind::Qstar,
            _ => return Err(Error::InvalidParameter(format!("unknown region kind `{s}`"))),
        })
    }
}

pub fn in_region(v: &Monomial, kind: RegionKind, params: RegionParams) -> bool {
    let (i, j, k) = (v.i as u64, v.j as u64, v.k as u64);
    let RegionParams { m, n } = params;
    match kind.base() {
        RegionKind::P => 4 * i + j <= 4 * m && 4 * i + k <= 4 * m + n && 8 * i + 2 * j + k <= 8 * m + n,
        _ => i + j <= m && 3 * i + 3 * j + k <= 3 * m + n,
    }
}

fn monomial(i: u64, j: u64, k: u64) -> Result<Monomial> {
    let c = |e: u64| u32::try_from(e).map_err(|_| Error::ExponentOverflow);
    Ok(Monomial::new(c(i)?, c(j)?, c(k)?))
}

/// The corners whose presence in the support makes a region-supported
/// polynomial starred: `(0,4m,n)` and `(0,2m,4m+n)` for `P*`, `(0,m,n)` for `Q*`.
pub fn corners(kind: RegionKind, params: RegionParams) -> Result<Vec<Monomial>> {
    let RegionParams { m, n } = params;
    match kind.base() {
        RegionKind::P => Ok(vec![monomial(0, 4 * m, n)?, monomial(0, 2 * m, 4 * m + n)?]),
        _ => Ok(vec![monomial(0, m, n)?]),
    }
}

/// The vertices of the convex hull of `P_{m,n}`.
pub fn s1_vertices(params: RegionParams) -> Result<[Monomial; 7]> {
    let RegionParams { m, n } = params;
    Ok([
        monomial(0, 0, 0)?,
        monomial(m, 0, 0)?,
        monomial(0, 4 * m, 0)?,
        monomial(m, 0, n)?,
        monomial(0, 4 * m, n)?,
        monomial(0, 2 * m, 4 * m + n)?,
        monomial(0, 0, 4 * m + n)?,
    ])
}

/// Support inside the base region of `kind`.
pub fn poly_in_region<K: Field>(p: &Polynomial<K>, kind: RegionKind, params: RegionParams) -> bool {
    p.terms().iter().all(|t| in_region(&t.0, kind, params))
}

/// Membership in `P*_{m,n}` or `Q*_{m,n}` by the defining conditions:
/// support containment and the exact `ldeg` equalities.
pub fn poly_in_star<K: Field>(p: &Polynomial<K>, kind: RegionKind, params: RegionParams) -> bool {
    if p.is_zero() || !poly_in_region(p, kind, params) {
        return false;
    }
    let Ok(c) = corners(kind, params) else { return false };
    match kind.base() {
        RegionKind::P => ldeg(p, 2) == Some(c[0]) && ldeg(p, 3) == Some(c[1]),
        _ => ldeg(p, 2) == Some(c[0]),
    }
}

/// The unique `(m, n)` with `p` in the starred set of `kind`, read off the
/// `ldeg_2` corner.
pub fn infer_star_params<K: Field>(p: &Polynomial<K>, kind: RegionKind) -> Option<RegionParams> {
    let v = ldeg(p, 2)?;
    if v.i != 0 {
        return None;
    }
    let m = match kind.base() {
        RegionKind::P if v.j % 4 == 0 => v.j as u64 / 4,
        RegionKind::P => return None,
        _ => v.j as u64,
    };
    let params = RegionParams::new(m, v.k as u64).ok()?;
    poly_in_star(p, kind, params).then_some(params)
}

/// Number of lattice points, without materializing them.
pub fn region_size(kind: RegionKind, params: RegionParams) -> u64 {
    let RegionParams { m, n } = params;
    let mut total = 0u64;
    match kind.base() {
        RegionKind::P => {
            for i in 0..=m {
                for j in 0..=4 * (m - i) {
                    let kmax = (4 * m + n - 4 * i).min(8 * m + n - 8 * i - 2 * j);
                    total += kmax + 1;
                }
            }
        }
        _ => {
            for i in 0..=m {
                for j in 0..=(m - i) {
                    total += 3 * m + n - 3 * i - 3 * j + 1;
                }
            }
        }
    }
    total
}

type RegionCache = RwLock<HashMap<(RegionKind, RegionParams), Arc<Vec<Monomial>>>>;

fn cache() -> &'static RegionCache {
    static CACHE: OnceLock<RegionCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All lattice points of the base region of `kind`, in ascending
/// lexicographic order of `(i, j, k)`. Results are cached.
pub fn enumerate_region(kind: RegionKind, params: RegionParams, budget: Budget) -> Result<Arc<Vec<Monomial>>> {
    let key = (kind.base(), params);
    if let Some(v) = cache().read().expect("region cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let size = region_size(kind, params);
    budget.check(usize::try_from(size).unwrap_or(usize::MAX))?;
    let RegionParams { m, n } = params;
    let mut out = Vec::with_capacity(size as usize);
    match kind.base() {
        RegionKind::P => {
            for i in 0..=m {
                for j in 0..=4 * (m - i) {
                    let kmax = (4 * m + n - 4 * i).min(8 * m + n - 8 * i - 2 * j);
                    for k in 0..=kmax {
                        out.push(monomial(i, j, k)?);
                    }
                }
            }
        }
        _ => {
            for i in 0..=m {
                for j in 0..=(m - i) {
                    for k in 0..=(3 * m + n - 3 * i - 3 * j) {
                        out.push(monomial(i, j, k)?);
                    }
                }
            }
        }
    }
    let out = Arc::new(out);
    cache().write().expect("region cache poisoned").insert(key, out.clone());
    Ok(out)
}

/// Union of the coordinate boxes below the points of `s`.
pub fn cub_closure<'a>(s: impl IntoIterator<Item = &'a Monomial>) -> BTreeSet<Monomial> {
    let mut out = BTreeSet::new();
    for v in s {
        for i in 0..=v.i {
            for j in 0..=v.j {
                for k in 0..=v.k {
                    out.insert(Monomial::new(i, j, k));
                }
            }
        }
    }
    out
}

/// A random element of a starred set: every region point is kept with
/// probability `density` (0 keeps only the corners), the corners always,
/// each with a random nonzero coefficient.
pub fn random_star_element<K: BaseField>(
    field: &K,
    kind: RegionKind,
    params: RegionParams,
    density: f64,
    rng: &mut SampleRng,
    budget: Budget,
) -> Result<Polynomial<K>> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("density {density} outside [0, 1]")));
    }
    let corners = corners(kind, params)?;
    let mut terms: Vec<(Monomial, K::Elem)> = corners.iter().map(|c| (*c, field.random_nonzero(rng))).collect();
    if density > 0.0 {
        let points = enumerate_region(kind, params, budget)?;
        for v in points.iter() {
            if !corners.contains(v) && (density >= 1.0 || rng.gen_bool(density)) {
                terms.push((*v, field.random_nonzero(rng)));
            }
        }
    }
    let p = Polynomial::from_terms(field, terms);
    debug_assert!(poly_in_star(&p, kind.starred(), params));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::word::beta;

    fn params(m: u64, n: u64) -> RegionParams {
        RegionParams::new(m, n).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(in_region(&Monomial::new(0, 4, 0), RegionKind::P, params(1, 0)));
        assert!(!in_region(&Monomial::new(1, 1, 0), RegionKind::P, params(1, 0)));
        assert!(in_region(&Monomial::ONE, RegionKind::Q, params(1, 0)));
    }

    #[test]
    fn sizes_match_enumeration() {
        for m in 1..=4 {
            for n in 0..=4 {
                for kind in [RegionKind::P, RegionKind::Q] {
                    let pts = enumerate_region(kind, params(m, n), Budget::UNLIMITED).unwrap();
                    assert_eq!(pts.len() as u64, region_size(kind, params(m, n)));
                    assert!(pts.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
        assert_eq!(region_size(RegionKind::P, params(1, 0)), 20);
        assert_eq!(region_size(RegionKind::Q, params(1, 0)), 6);
    }

    #[test]
    fn enumeration_respects_budget() {
        let err = enumerate_region(RegionKind::P, params(40, 0), Budget::terms(1000)).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn star_membership_examples() {
        let q = Rationals;
        let xz = &Polynomial::x(&q) * &Polynomial::z(&q);
        let img = beta(&q).apply(&xz, Budget::UNLIMITED).unwrap();
        assert!(poly_in_star(&img, RegionKind::Pstar, params(1, 1)));
        assert!(!poly_in_star(&Polynomial::y(&q), RegionKind::Pstar, params(1, 0)));
        assert!(!poly_in_star(&Polynomial::zero(&q), RegionKind::Qstar, params(1, 0)));
    }

    #[test]
    fn parameter_inference() {
        let q = Rationals;
        let xb = beta(&q).apply(&Polynomial::x(&q), Budget::UNLIMITED).unwrap();
        assert_eq!(infer_star_params(&xb, RegionKind::Pstar), Some(params(1, 0)));
        assert_eq!(infer_star_params(&xb, RegionKind::Qstar), Some(params(4, 0)));
        assert_eq!(infer_star_params(&Polynomial::x(&q), RegionKind::Pstar), None);
    }

    #[test]
    fn cub_examples() {
        let c = cub_closure(&[Monomial::new(1, 1, 0)]);
        assert_eq!(c.len(), 4);
        assert!(cub_closure(&[]).is_empty());
    }
}
