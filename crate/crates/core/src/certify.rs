//! Consequences of `P*`-stability: non-affineness certificates for words in
//! `<A, theta_N>`, the centralizer `C = A4`, the degree-bound exclusion and
//! nontriviality of the amalgam `A *_C <C, theta_N>`.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::affine::AffineMap;
use crate::endomorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::field::{BaseField, Field, GaloisField};
use crate::poly::{Budget, Polynomial};
use crate::region::{infer_star_params, poly_in_star, RegionKind, RegionParams};
use crate::report::{run_samples, sample_rng, Counterexample, Outcome, VerificationReport};
use crate::stability::{brief, hop_outcome, theorem_route, Hop};
use crate::strata::{centralizer_elements, classify, random_in_stratum, Stratum};
use crate::word::{beta, pi, Atom, Word};

/// Points used for each pointwise comparison.
pub const AGREEMENT_POINTS: usize = 100;

/// Witness polynomials larger than this are dropped in stepwise mode.
pub const STEPWISE_WITNESS_TERMS: usize = 20_000;

/// Eager certificates carry the witness through at most this many hops,
/// counting the initial `pi beta`.
pub const EAGER_HOP_CAP: usize = 5;

/// Samples per hop type when a hop is verified on its input family.
pub const HOP_SAMPLES: usize = 3;

// ---------------------------------------------------------------------------
// Pointwise comparison in a large field

/// `w` over the field used for pointwise comparisons.
pub fn evaluation_word<K: BaseField>(w: &Word<K>) -> Result<Word<GaloisField>> {
    let src = w.field();
    let g = src.evaluation_field();
    let p = g.prime();
    w.map_field(&g, |a| src.reduce_mod(a, p).map(|v| g.embed(v)))
        .ok_or_else(|| Error::NotInvertible(format!("a coefficient of {w} modulo {p}")))
}

/// Index of the first of `points` seeded random points at which `a` and
/// `b` differ, or `None` if they agree at all of them.
pub fn first_disagreement<K: BaseField>(a: &Word<K>, b: &Word<K>, points: usize, seed: u64) -> Result<Option<usize>> {
    let (ea, eb) = (evaluation_word(a)?, evaluation_word(b)?);
    let g = ea.field().clone();
    Ok((0..points).find(|&i| {
        let mut rng = sample_rng(seed, i as u64);
        let pt: [_; 3] = std::array::from_fn(|_| g.random_elem(&mut rng));
        ea.eval(&pt) != eb.eval(&pt)
    }))
}

// ---------------------------------------------------------------------------
// Alternating words

/// `alpha_0 theta_N alpha_1 theta_N ... theta_N alpha_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingWord<K: Field> {
    pub n: usize,
    pub affines: Vec<AffineMap<K>>,
}

impl<K: Field> AlternatingWord<K> {
    pub fn new(n: usize, affines: Vec<AffineMap<K>>) -> Result<Self> {
        if affines.is_empty() {
            return Err(Error::InvalidParameter("an alternating word needs alpha_0".into()));
        }
        let f = affines[0].field();
        if affines.iter().any(|a| a.field() != f) {
            return Err(Error::InvalidParameter("affine maps over different fields".into()));
        }
        Ok(AlternatingWord { n, affines })
    }

    /// Number of `theta` occurrences.
    pub fn r(&self) -> usize {
        self.affines.len() - 1
    }

    pub fn field(&self) -> &K {
        self.affines[0].field()
    }

    /// True when no interior `alpha_i` lies in `A4`.
    pub fn is_normal(&self) -> bool {
        let r = self.r();
        (1..r).all(|i| classify(&self.affines[i]).stratum != Stratum::A4)
    }

    pub fn to_word(&self) -> Word<K> {
        let f = self.field();
        let theta = Word::theta(f, self.n);
        let mut w = Word::atom(f, Atom::Affine(self.affines[0].clone()));
        for a in &self.affines[1..] {
            w = w.then(&theta);
            w.push(Atom::Affine(a.clone()));
        }
        w
    }
}

impl<K: Field> fmt::Display for AlternatingWord<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.affines.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(&format!(" ; theta({}) ; ", self.n)))
    }
}

/// Absorbs interior `alpha_i` in `A4` through `theta alpha_i theta = alpha_i`
/// (elements of `A4` commute with the involution `theta`), merging the
/// neighbouring affine maps, until no interior map lies in `A4`.
pub fn normalize_word<K: Field>(w: &AlternatingWord<K>) -> AlternatingWord<K> {
    let mut affines = w.affines.clone();
    while let Some(i) = (1..affines.len().saturating_sub(1)).find(|&i| classify(&affines[i]).stratum == Stratum::A4) {
        let merged = affines[i - 1].compose(&affines[i]).compose(&affines[i + 1]);
        affines.splice(i - 1..=i + 1, [merged]);
    }
    AlternatingWord { n: w.n, affines }
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateMode {
    /// Carry the witness through every hop.
    Eager,
    /// Carry the witness while it is small, then verify each remaining hop
    /// on sampled members of its input family.
    Stepwise,
}

impl std::str::FromStr for CertificateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eager" => Ok(CertificateMode::Eager),
            "stepwise" => Ok(CertificateMode::Stepwise),
            _ => Err(Error::InvalidParameter(format!("unknown certificate mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum HopEvidence {
    /// The witness itself was mapped and checked.
    Witness { terms: usize },
    /// The hop was checked on sampled members of its input family at small
    /// parameters.
    Sampled { params: RegionParams, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HopRecord {
    pub index: usize,
    pub word: String,
    pub input: String,
    pub output: String,
    pub evidence: HopEvidence,
}

#[derive(Clone, Debug)]
pub struct Certificate<K: Field> {
    pub mode: CertificateMode,
    /// `alpha_0^-1`.
    pub alpha: AffineMap<K>,
    /// `alpha_r^-1 pi`.
    pub alpha_prime: AffineMap<K>,
    /// `alpha phi alpha'` regrouped as `pi beta` followed by the hop words.
    pub bracketed: Word<K>,
    pub hops: Vec<HopRecord>,
    /// `P*` parameters of `(y) alpha phi alpha'`.
    pub params: RegionParams,
    /// `(y) alpha phi alpha'`, when it was carried to the end.
    pub witness: Option<Polynomial<K>>,
    /// Points at which the bracketed word was compared with the raw word.
    pub agreement_points: usize,
}

impl<K: Field> Certificate<K> {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "mode": self.mode,
            "alpha": self.alpha.to_string(),
            "alpha_prime": self.alpha_prime.to_string(),
            "params": self.params,
            "hops": self.hops,
            "witness": self.witness.as_ref().map(brief),
            "agreement_points": self.agreement_points,
        })
    }
}

/// The hops of `alpha phi alpha' = (pi beta) (pi beta)^(N-1)
/// prod_i [(pi beta^-1)^N alpha_i' pi (pi beta)^N] (pi beta^-1)^N`
/// after the leading `pi beta`, with `alpha_i' = pi alpha_i pi`.
fn certificate_hops<K: Field>(w: &AlternatingWord<K>) -> Result<Vec<Hop<K>>> {
    let f = w.field();
    let n = w.n;
    let fwd = || Hop::pi_beta(f, false, RegionKind::Pstar);
    let back = || Hop::pi_beta(f, true, RegionKind::Pstar);
    let mut hops: Vec<Hop<K>> = (1..n).map(|_| fwd()).collect();
    let p = AffineMap::pi(f);
    for a in &w.affines[1..w.affines.len() - 1] {
        let conj = p.compose(a).compose(&p);
        hops.extend((3..n).map(|_| back()));
        hops.extend(theorem_route(&conj)?);
        hops.extend((3..n).map(|_| fwd()));
    }
    hops.extend((0..n).map(|_| back()));
    Ok(hops)
}

/// Builds the certificate that `(y) alpha phi alpha'` lies in `P*` for a
/// normal alternating word with `r >= 1`.
///
/// Every hop checks its input and output membership; a hop failure would be
/// a counterexample to the stability theorem.
pub fn build_certificate<K: BaseField>(
    w: &AlternatingWord<K>,
    mode: CertificateMode,
    seed: u64,
    budget: Budget,
) -> Result<Certificate<K>> {
    let f = w.field();
    if w.r() == 0 {
        return Err(Error::Precondition("the word is affine (r = 0)".into()));
    }
    if w.n == 0 {
        return Err(Error::Precondition("theta_0 is pi".into()));
    }
    if !w.is_normal() {
        return Err(Error::Precondition("an interior affine map lies in A4; normalize first".into()));
    }
    if w.r() >= 2 && w.n < 3 {
        return Err(Error::Precondition("interior affine maps need N >= 3".into()));
    }
    let alpha = w.affines[0].inverse();
    let alpha_prime = w.affines[w.r()].inverse().compose(&AffineMap::pi(f));
    let hops = certificate_hops(w)?;
    if mode == CertificateMode::Eager && hops.len() + 1 > EAGER_HOP_CAP {
        return Err(Error::Precondition(format!(
            "eager certificates are capped at {EAGER_HOP_CAP} hops, this word needs {}",
            hops.len() + 1
        )));
    }

    let mut bracketed = Word::new(f, vec![Atom::Pi, Atom::Beta]);
    for h in &hops {
        bracketed = bracketed.then(&h.word);
    }
    let mut raw = Word::atom(f, Atom::Affine(alpha.clone())).then(&w.to_word());
    raw.push(Atom::Affine(alpha_prime.clone()));
    if let Some(i) = first_disagreement(&bracketed, &raw, AGREEMENT_POINTS, seed)? {
        return Err(Error::Disagreement(format!("bracketed word differs from alpha phi alpha' at point {i}")));
    }

    let start = pi(f).compose(&beta(f), Budget::UNLIMITED)?.apply(&Polynomial::y(f), budget)?;
    let mut params = RegionParams::new(1, 0)?;
    if !poly_in_star(&start, RegionKind::Pstar, params) {
        return Err(Error::HopFailure { hop: 0, reason: format!("(y) pi beta = {start} is not in P*(1,0)") });
    }
    let witness_limit = match mode {
        CertificateMode::Eager => budget,
        CertificateMode::Stepwise => {
            Budget::terms(budget.limit().map_or(STEPWISE_WITNESS_TERMS, |b| b.min(STEPWISE_WITNESS_TERMS)))
        }
    };
    let small = RegionParams::new(1, 0)?;
    let mut witness = Some(start.clone());
    let mut sampled: HashSet<String> = HashSet::new();
    let mut records = Vec::with_capacity(hops.len() + 1);
    records.push(HopRecord {
        index: 0,
        word: "pi ; beta".into(),
        input: "y".into(),
        output: format!("P*{params}"),
        evidence: HopEvidence::Witness { terms: start.len() },
    });
    for (i, hop) in hops.iter().enumerate() {
        let index = i + 1;
        let word = hop.word.to_string();
        let out_params = hop.predict(params)?;
        let mut evidence = None;
        if let Some(p) = witness.take() {
            match hop.apply(index, &p, params, witness_limit) {
                Ok((q, _)) => {
                    evidence = Some(HopEvidence::Witness { terms: q.len() });
                    witness = Some(q);
                }
                Err(e) if e.is_budget() && mode == CertificateMode::Stepwise => {}
                Err(e) => return Err(e),
            }
        }
        let evidence = match evidence {
            Some(e) => e,
            None => {
                let key = format!("{word}|{}", hop.input);
                if sampled.insert(key) {
                    let outcomes = run_samples(HOP_SAMPLES, |s| hop_outcome(hop, index, small, seed, s, budget));
                    for o in outcomes {
                        match o {
                            Outcome::Pass => {}
                            Outcome::Fail(c) => {
                                return Err(Error::HopFailure { hop: index, reason: format!("{}: {}", c.input, c.got) })
                            }
                            Outcome::Budget(msg) => return Err(Error::Precondition(msg)),
                        }
                    }
                }
                HopEvidence::Sampled { params: small, samples: HOP_SAMPLES }
            }
        };
        records.push(HopRecord {
            index,
            word,
            input: format!("{}{}", hop.input, params),
            output: format!("{}{}", hop.output, out_params),
            evidence,
        });
        params = out_params;
    }
    if let Some(p) = &witness {
        let inferred = infer_star_params(p, RegionKind::Pstar);
        if inferred != Some(params) {
            return Err(Error::HopFailure {
                hop: hops.len(),
                reason: format!("witness parameters {inferred:?}, law gives {params}"),
            });
        }
    }
    Ok(Certificate {
        mode,
        alpha,
        alpha_prime,
        bracketed,
        hops: records,
        params,
        witness,
        agreement_points: AGREEMENT_POINTS,
    })
}

// ---------------------------------------------------------------------------
// Exclusion criteria

/// True when `phi` is not affine and every coordinate image has total degree
/// at most 5; such `phi` is outside `<A, theta_N>` for every `N`, since
/// members of `P*` have total degree at least 6.
///
/// Images of the affine-linear `f` are affine combinations of the coordinate
/// images, so checking the coordinates covers every `f` of degree 1.
pub fn excluded_by_degree_bound<K: Field>(phi: &Endomorphism<K>) -> bool {
    !phi.is_affine() && phi.total_degree().is_some_and(|d| d <= 5)
}

/// `C = A4`: every `(u^2 x, u^2 y, u z)` with `u^6 = 1` commutes exactly with
/// `beta` and `pi` (hence with `theta_N`), and `trials` sampled affine maps
/// outside `A4` fail to commute with `theta_N` at some point.
pub fn centralizer_report<K: BaseField>(field: &K, n: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut report =
        VerificationReport::new("centralizer", field.spec(), Some(seed), json!({ "N": n, "trials": trials }));
    let elements = centralizer_elements(field);
    let (b, p) = (beta(field), pi(field));
    for c in &elements {
        let ce = c.to_endomorphism();
        for (name, g) in [("beta", &b), ("pi", &p)] {
            let lhs = ce.compose(g, Budget::UNLIMITED)?;
            let rhs = g.compose(&ce, Budget::UNLIMITED)?;
            report
                .claim(lhs == rhs, || Counterexample::new(c.to_string(), format!("commutes with {name}"), &rhs, &lhs));
        }
    }
    let theta = Word::theta(field, n);
    let outcomes = run_samples(trials, |i| {
        let mut rng = sample_rng(seed, i as u64);
        let level = Stratum::LEVELS[i % Stratum::LEVELS.len()];
        let a = random_in_stratum(field, level, &mut rng);
        let left = Word::atom(field, Atom::Affine(a.clone())).then(&theta);
        let mut right = theta.clone();
        right.push(Atom::Affine(a.clone()));
        match first_disagreement(&left, &right, AGREEMENT_POINTS, seed ^ 0x5eed_0000 ^ i as u64) {
            Ok(Some(_)) => Outcome::Pass,
            Ok(None) => Outcome::Fail(Counterexample::new(
                a.to_string(),
                "non-commutation",
                "alpha theta != theta alpha",
                format!("agreement at {AGREEMENT_POINTS} points"),
            )),
            Err(e) => Outcome::from_error(e, a.to_string(), "evaluation"),
        }
    });
    report.record_all(outcomes);
    report.details = json!({
        "order": elements.len(),
        "elements": elements.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    Ok(report)
}

/// For `phi = rho_1 alpha_1 ... alpha_(r-1) rho_r` with `rho_i = theta c_i`,
/// `c_i` in `A4` and `alpha_i` affine outside `A4`: rewrites `phi` as
/// `id theta (c_1 alpha_1) theta ... theta c_r` and returns `true` when a
/// stepwise certificate exists, so that `phi` is not affine.
pub fn amalgam_nontriviality<K: BaseField>(
    n: usize,
    cs: &[AffineMap<K>],
    alphas: &[AffineMap<K>],
    seed: u64,
    budget: Budget,
) -> Result<bool> {
    if cs.is_empty() {
        return Err(Error::Precondition("empty word".into()));
    }
    if cs.len() != alphas.len() + 1 {
        return Err(Error::Precondition("expected one more rho than alpha".into()));
    }
    if let Some(c) = cs.iter().find(|c| classify(c).stratum != Stratum::A4) {
        return Err(Error::Precondition(format!("{c} is not in C = A4")));
    }
    if let Some(a) = alphas.iter().find(|a| classify(a).stratum == Stratum::A4) {
        return Err(Error::Precondition(format!("{a} lies in <C, theta>")));
    }
    let f = cs[0].field();
    let mut affines = vec![AffineMap::identity(f)];
    affines.extend(cs.iter().zip(alphas).map(|(c, a)| c.compose(a)));
    affines.push(cs[cs.len() - 1].clone());
    let w = AlternatingWord::new(n, affines)?;

    let theta = Word::theta(f, n);
    let mut phi = Word::empty(f);
    for (i, c) in cs.iter().enumerate() {
        phi = phi.then(&theta);
        phi.push(Atom::Affine(c.clone()));
        if let Some(a) = alphas.get(i) {
            phi.push(Atom::Affine(a.clone()));
        }
    }
    if let Some(i) = first_disagreement(&phi, &w.to_word(), AGREEMENT_POINTS, seed)? {
        return Err(Error::Disagreement(format!("rewritten word differs at point {i}")));
    }
    build_certificate(&w, CertificateMode::Stepwise, seed, budget)?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn normalize_absorbs_a4() {
        let f = PrimeField::new(7).unwrap();
        let c = AffineMap::from_i64(&f, [[4, 0, 0], [0, 4, 0], [0, 0, 2]], [0, 0, 0]).unwrap();
        let a0 = AffineMap::from_i64(&f, [[1, 2, 0], [0, 1, 0], [0, 3, 1]], [1, 0, 0]).unwrap();
        let a2 = AffineMap::pi(&f);
        let w = AlternatingWord::new(3, vec![a0.clone(), c.clone(), a2.clone()]).unwrap();
        let nw = normalize_word(&w);
        assert_eq!(nw.affines, vec![a0.compose(&c).compose(&a2)]);
        assert_eq!(first_disagreement(&w.to_word(), &nw.to_word(), 50, 1).unwrap(), None);

        let id = AffineMap::identity(&f);
        let tt = AlternatingWord::new(3, vec![id.clone(), id.clone(), id.clone()]).unwrap();
        assert_eq!(normalize_word(&tt).affines, vec![id]);
        let normal = AlternatingWord::new(3, vec![a0.clone(), a2.clone()]).unwrap();
        assert_eq!(normalize_word(&normal), normal);
    }

    #[test]
    fn stepwise_r1_n3() {
        let f = f101();
        let id = AffineMap::identity(&f);
        let w = AlternatingWord::new(3, vec![id.clone(), id]).unwrap();
        let cert = build_certificate(&w, CertificateMode::Stepwise, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(cert.hops.len(), 6);
        assert_eq!(cert.params, RegionParams::new(4u64.pow(5), 0).unwrap());
    }

    #[test]
    fn eager_cap() {
        let f = f101();
        let id = AffineMap::identity(&f);
        let w = AlternatingWord::new(3, vec![id.clone(), id]).unwrap();
        assert!(matches!(
            build_certificate(&w, CertificateMode::Eager, 0, Budget::UNLIMITED),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn degree_bound_examples() {
        let q = Rationals;
        let (x, y, z) = (Polynomial::x(&q), Polynomial::y(&q), Polynomial::z(&q));
        let sq = Endomorphism::new([&x + &(&y * &y), y.clone(), z.clone()]);
        assert!(excluded_by_degree_bound(&sq));
        assert!(!excluded_by_degree_bound(&AffineMap::pi(&q).to_endomorphism()));
        let y6 = Endomorphism::new([&x + &y.pow(6).unwrap(), y, z]);
        assert!(!excluded_by_degree_bound(&y6));
    }

    #[test]
    fn centralizer_over_f7() {
        let r = centralizer_report(&PrimeField::new(7).unwrap(), 3, 8, 1).unwrap();
        assert!(r.passed(), "{}", r.to_json_line());
        assert_eq!(r.details["order"], 6);
    }

    #[test]
    fn amalgam_examples() {
        let f = f101();
        let id = AffineMap::identity(&f);
        assert!(amalgam_nontriviality(3, std::slice::from_ref(&id), &[], 0, Budget::UNLIMITED).unwrap());
        assert!(matches!(
            amalgam_nontriviality::<PrimeField>(3, &[], &[], 0, Budget::UNLIMITED),
            Err(Error::Precondition(_))
        ));
    }
}
