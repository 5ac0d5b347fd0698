//! Mechanical checks of the stability argument: the `beta`-shaped lemma,
//! the linear-form maximization lemma, the four stratum propositions with
//! their explicit conjugation formulas, and the assembled theorem that `P*`
//! is stable under `pi beta`, `pi beta^-1` and `(pi beta^-1)^3 alpha pi (pi beta)^3`.
//!
//! Universally quantified claims are checked on seeded random members of
//! the starred sets. Sample `i` uses density `DENSITIES[i % 3]`, so every
//! run covers corner-only, sparse and full-support inputs.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use crate::affine::AffineMap;
use crate::degree::{ldeg, DegreeFn, DegreeValue};
use crate::endomorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::field::{BaseField, Field};
use crate::monomial::Monomial;
use crate::poly::{Budget, Polynomial};
use crate::region::{
    enumerate_region, infer_star_params, poly_in_star, random_star_element, s1_vertices, RegionKind, RegionParams,
};
use crate::report::{run_samples, sample_rng, Counterexample, Outcome, VerificationReport};
use crate::strata::{classify, Stratum};
use crate::word::{beta, pi, Atom, Word};

/// Sampling densities: corners only, sparse, full support.
pub const DENSITIES: [f64; 3] = [0.0, 0.2, 1.0];

/// Short text for a possibly huge polynomial.
pub fn brief<K: Field>(p: &Polynomial<K>) -> String {
    if p.len() <= 12 {
        return p.to_string();
    }
    let show = |v: Option<Monomial>| v.map_or("-inf".to_string(), |v| v.to_string());
    format!("<{} terms, ldeg2 {}, ldeg3 {}>", p.len(), show(ldeg(p, 2)), show(ldeg(p, 3)))
}

// ---------------------------------------------------------------------------
// Linear-form maximization over P_{m,n}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LinearForm {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl LinearForm {
    pub fn new(a: u64, b: u64, c: u64) -> Result<Self> {
        if a == 0 && b == 0 && c == 0 {
            return Err(Error::InvalidParameter("linear form must be nonzero".into()));
        }
        Ok(LinearForm { a, b, c })
    }

    pub fn eval(&self, v: &Monomial) -> u64 {
        v.dot([self.a, self.b, self.c])
    }

    /// The lemma's cases whose hypotheses hold (at most one does):
    ///
    /// 1. `b > max(a/4, 2c)`, `c != 0`
    /// 2. `b > a/4`, `c = 0`
    /// 3. `c > max(b/2, (a-2b)/4)`, `b != 0`
    /// 4. `c > a/4`, `b = 0`
    /// 5. `c = (a-2b)/4 > b/2`
    pub fn cases(&self) -> Vec<u8> {
        let (a, b, c) = (self.a as i64, self.b as i64, self.c as i64);
        let mut out = Vec::new();
        if 4 * b > a && b > 2 * c && c != 0 {
            out.push(1);
        }
        if 4 * b > a && c == 0 {
            out.push(2);
        }
        if 2 * c > b && 4 * c > a - 2 * b && b != 0 {
            out.push(3);
        }
        if 4 * c > a && b == 0 {
            out.push(4);
        }
        if 4 * c == a - 2 * b && 2 * c > b {
            out.push(5);
        }
        out
    }
}

/// The argmax the lemma predicts for `case` on `P_{m,n}`.
pub fn predicted_argmax(case: u8, params: RegionParams) -> Result<BTreeSet<Monomial>> {
    let RegionParams { m, n } = params;
    let mono = |i: u64, j: u64, k: u64| -> Result<Monomial> {
        let c = |e: u64| u32::try_from(e).map_err(|_| Error::ExponentOverflow);
        Ok(Monomial::new(c(i)?, c(j)?, c(k)?))
    };
    let set: Result<BTreeSet<Monomial>> = match case {
        1 => [mono(0, 4 * m, n)].into_iter().collect(),
        2 => (0..=n).map(|d| mono(0, 4 * m, d)).collect(),
        3 => [mono(0, 2 * m, 4 * m + n)].into_iter().collect(),
        4 => (0..=2 * m).map(|d| mono(0, d, 4 * m + n)).collect(),
        5 => (0..=m).map(|d| mono(m - d, 2 * d, 4 * d + n)).collect(),
        _ => return Err(Error::InvalidParameter(format!("no lemma case {case}"))),
    };
    set
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximizationOutcome {
    pub form: LinearForm,
    pub params: RegionParams,
    pub max: u64,
    /// Ascending lexicographic order.
    pub argmax: Vec<Monomial>,
    /// The applicable case, if any.
    pub case: Option<u8>,
    pub predicted: Option<Vec<Monomial>>,
    /// More than one case applied with different predictions.
    pub conflicting: bool,
}

impl MaximizationOutcome {
    /// `None` for unclassified forms.
    pub fn matches(&self) -> Option<bool> {
        self.predicted.as_ref().map(|p| *p == self.argmax)
    }
}

/// Brute-force maximum and argmax over `P_{m,n}`, with the lemma's prediction.
pub fn maximize_linear_form(form: LinearForm, params: RegionParams, budget: Budget) -> Result<MaximizationOutcome> {
    let points = enumerate_region(RegionKind::P, params, budget)?;
    let max = points.iter().map(|v| form.eval(v)).max().expect("regions contain the origin");
    let argmax: Vec<Monomial> = points.iter().filter(|v| form.eval(v) == max).copied().collect();
    let cases = form.cases();
    let predictions = cases.iter().map(|c| predicted_argmax(*c, params)).collect::<Result<Vec<_>>>()?;
    let conflicting = predictions.windows(2).any(|w| w[0] != w[1]);
    Ok(MaximizationOutcome {
        form,
        params,
        max,
        argmax,
        case: cases.first().copied(),
        predicted: predictions.first().map(|s| s.iter().copied().collect()),
        conflicting,
    })
}

/// Runs the maximization lemma over every nonzero `(a,b,c)` with entries
/// up to `max_coeff` and every `1 <= m <= max_m`, `0 <= n <= max_n`.
/// Each classified instance is one sample.
pub fn check_lemma_grid(max_coeff: u64, max_m: u64, max_n: u64, budget: Budget) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "lemma-max",
        crate::field::FieldSpec::Rationals,
        None,
        json!({ "max_coeff": max_coeff, "max_m": max_m, "max_n": max_n }),
    );
    let mut per_case = [[0usize; 2]; 5];
    let mut unclassified = 0usize;
    let mut failures = Vec::new();
    for m in 1..=max_m {
        for n in 0..=max_n {
            let params = RegionParams::new(m, n)?;
            for a in 0..=max_coeff {
                for b in 0..=max_coeff {
                    for c in 0..=max_coeff {
                        let Ok(form) = LinearForm::new(a, b, c) else { continue };
                        let out = maximize_linear_form(form, params, budget)?;
                        if out.conflicting {
                            report.record(Outcome::Fail(Counterexample::new(
                                format!("form {a},{b},{c} on P{params}"),
                                "case hypotheses",
                                "at most one applicable prediction",
                                format!("{:?}", form.cases()),
                            )));
                            continue;
                        }
                        let Some(case) = out.case else {
                            unclassified += 1;
                            continue;
                        };
                        let ok = out.matches() == Some(true);
                        per_case[case as usize - 1][usize::from(!ok)] += 1;
                        if !ok && failures.len() < 12 {
                            failures.push(json!({ "form": [a, b, c], "params": [m, n], "case": case }));
                        }
                        report.claim(ok, || {
                            Counterexample::new(
                                format!("form ({a},{b},{c}) on P{params}"),
                                format!("case {case}"),
                                fmt_points(out.predicted.as_deref().unwrap_or_default()),
                                fmt_points(&out.argmax),
                            )
                        });
                    }
                }
            }
        }
    }
    let cases: Vec<_> = per_case
        .iter()
        .enumerate()
        .map(|(i, [ok, bad])| json!({ "case": i + 1, "matched": ok, "mismatched": bad }))
        .collect();
    report.details = json!({ "cases": cases, "unclassified": unclassified, "mismatches": failures });
    Ok(report)
}

fn fmt_points(points: &[Monomial]) -> String {
    let parts: Vec<String> = points.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

// ---------------------------------------------------------------------------
// beta-shaped maps

/// The degree functions of the `beta`-shaped definition, in table order:
/// `deg_(4,1,0)`, `deg_(4,0,1)`, `deg_(8,2,1)`, `ldeg_1`, `ldeg_2`, `ldeg_3`.
pub fn shape_degree_fns() -> [DegreeFn; 6] {
    [
        DegreeFn::weighted([4, 1, 0]),
        DegreeFn::weighted([4, 0, 1]),
        DegreeFn::weighted([8, 2, 1]),
        DegreeFn::lex(1),
        DegreeFn::lex(2),
        DegreeFn::lex(3),
    ]
}

/// Degrees of the three components under [`shape_degree_fns`]; row `r` is
/// component `r`.
pub fn shape_table<K: Field>(gamma: &Endomorphism<K>) -> [[DegreeValue; 6]; 3] {
    let fns = shape_degree_fns();
    std::array::from_fn(|r| std::array::from_fn(|c| fns[c].eval(&gamma.components()[r])))
}

/// The degree table shared by every `beta`-shaped map.
pub fn beta_shape_reference() -> [[DegreeValue; 6]; 3] {
    let w = DegreeValue::Weighted;
    let l = |order: usize, v: (u32, u32, u32)| DegreeValue::Lex { order, v: v.into() };
    [
        [w(4), w(4), w(8), l(1, (1, 0, 0)), l(2, (0, 4, 0)), l(3, (0, 2, 4))],
        [w(1), w(2), w(2), l(1, (0, 1, 0)), l(2, (0, 1, 0)), l(3, (0, 0, 2))],
        [w(0), w(1), w(1), l(1, (0, 0, 1)), l(2, (0, 0, 1)), l(3, (0, 0, 1))],
    ]
}

pub fn is_beta_shaped<K: Field>(gamma: &Endomorphism<K>) -> bool {
    shape_table(gamma) == beta_shape_reference()
}

// ---------------------------------------------------------------------------
// Hops: one application of a fixed automorphism between starred families

/// How a hop's output parameters follow from its input parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HopLaw {
    /// `P*_{m,n} -> P*_{4m,n}`, through `P*_{m,n} < Q*_{4m,n}`.
    Quadruple,
    /// `Q*_{m,n} -> P*_{m,n}`.
    Preserve,
    /// `P*_{m,n} -> Q*_{m',n'}` with `m' = max f`, `n' = max g - 3m'` over
    /// `P_{m,n}`, where `f` and `g` weight `x^v` by the `(1,1,0)`- and
    /// `(3,3,1)`-degrees of the hop's component images.
    LinearForm,
}

#[derive(Clone, Debug)]
pub struct Hop<K: Field> {
    pub word: Word<K>,
    pub input: RegionKind,
    pub output: RegionKind,
    pub law: HopLaw,
    /// Eager expansion of `word`.
    pub map: Endomorphism<K>,
}

impl<K: Field> Hop<K> {
    pub fn new(word: Word<K>, input: RegionKind, output: RegionKind, law: HopLaw) -> Result<Self> {
        let map = word.to_endomorphism(Budget::UNLIMITED)?;
        Ok(Hop { word, input, output, law, map })
    }

    /// `pi beta` or `pi beta^-1` acting on `input`.
    pub fn pi_beta(field: &K, inverse: bool, input: RegionKind) -> Self {
        let law = if input == RegionKind::Pstar { HopLaw::Quadruple } else { HopLaw::Preserve };
        Self::new(Word::pi_beta_power(field, 1, inverse), input, RegionKind::Pstar, law).expect("small expansion")
    }

    pub fn predict(&self, params: RegionParams) -> Result<RegionParams> {
        match self.law {
            HopLaw::Quadruple => RegionParams::new(4 * params.m, params.n),
            HopLaw::Preserve => Ok(params),
            HopLaw::LinearForm => linear_form_law(&self.map, params),
        }
    }

    /// Applies the hop to a member of its input family, asserting the input
    /// and output memberships. Failures are [`Error::HopFailure`].
    pub fn apply(
        &self,
        index: usize,
        p: &Polynomial<K>,
        params: RegionParams,
        budget: Budget,
    ) -> Result<(Polynomial<K>, RegionParams)> {
        if !poly_in_star(p, self.input, params) {
            return Err(Error::HopFailure {
                hop: index,
                reason: format!("input {} is not in {}{}", brief(p), self.input, params),
            });
        }
        let out_params = self.predict(params)?;
        let q = self.map.apply(p, budget)?;
        if !poly_in_star(&q, self.output, out_params) {
            let inferred = infer_star_params(&q, self.output).map_or("none".to_string(), |p| p.to_string());
            return Err(Error::HopFailure {
                hop: index,
                reason: format!("image {} not in {}{} (inferred {})", brief(&q), self.output, out_params, inferred),
            });
        }
        Ok((q, out_params))
    }
}

/// Output parameters of a `P* -> Q*` hop with component images `gamma`.
pub fn linear_form_law<K: Field>(gamma: &Endomorphism<K>, params: RegionParams) -> Result<RegionParams> {
    let deg = |w: [u64; 3]| -> Result<[u64; 3]> {
        let mut out = [0; 3];
        for (r, comp) in gamma.components().iter().enumerate() {
            out[r] =
                comp.weighted_degree(w).ok_or_else(|| Error::Precondition("hop map has a zero component".into()))?;
        }
        Ok(out)
    };
    let (f, g) = (deg([1, 1, 0])?, deg([3, 3, 1])?);
    let vertices = s1_vertices(params)?;
    let m2 = vertices.iter().map(|v| v.dot(f)).max().expect("seven vertices");
    let g_max = vertices.iter().map(|v| v.dot(g)).max().expect("seven vertices");
    RegionParams::new(m2, g_max - 3 * m2)
}

fn affine_atom<K: Field>(alpha: &AffineMap<K>) -> Atom<K> {
    Atom::Affine(alpha.clone())
}

/// The composite each stratum proposition sends from `P*` into `Q*`:
/// `alpha beta`, `pi beta^-1 alpha beta`, `pi beta^-1 alpha beta pi beta`,
/// `(pi beta^-1)^2 alpha beta pi beta`.
pub fn proposition_word<K: Field>(level: Stratum, alpha: &AffineMap<K>) -> Result<Word<K>> {
    use Atom::*;
    let a = affine_atom(alpha);
    let atoms = match level {
        Stratum::A0A1 => vec![a, Beta],
        Stratum::A1A2 => vec![Pi, BetaInv, a, Beta],
        Stratum::A2A3 => vec![Pi, BetaInv, a, Beta, Pi, Beta],
        Stratum::A3A4 => vec![Pi, BetaInv, Pi, BetaInv, a, Beta, Pi, Beta],
        other => return Err(Error::Precondition(format!("no proposition for {other}"))),
    };
    Ok(Word::new(alpha.field(), atoms))
}

/// The theorem word `(pi beta^-1)^3 alpha pi (pi beta)^3`.
pub fn theorem_word<K: Field>(alpha: &AffineMap<K>) -> Word<K> {
    let f = alpha.field();
    let mut w = Word::pi_beta_power(f, 3, true);
    w.push(affine_atom(alpha));
    w.push(Atom::Pi);
    w.then(&Word::pi_beta_power(f, 3, false))
}

/// The hop decomposition of the theorem word used for `alpha`'s stratum.
/// The hops concatenate to the theorem word up to cancelling `pi pi`.
pub fn theorem_route<K: Field>(alpha: &AffineMap<K>) -> Result<Vec<Hop<K>>> {
    let f = alpha.field();
    let level = classify(alpha).stratum;
    let inverse_hops = match level {
        Stratum::A0A1 => 3,
        Stratum::A1A2 => 2,
        Stratum::A2A3 => 2,
        Stratum::A3A4 => 1,
        _ => {
            return Err(Error::Precondition(format!(
                "alpha in {level}: the theorem word need not preserve P* for alpha in A4"
            )))
        }
    };
    let closing = match level {
        Stratum::A0A1 | Stratum::A1A2 => 2,
        _ => 1,
    };
    let mut hops = Vec::with_capacity(inverse_hops + 1 + closing);
    for _ in 0..inverse_hops {
        hops.push(Hop::pi_beta(f, true, RegionKind::Pstar));
    }
    hops.push(Hop::new(proposition_word(level, alpha)?, RegionKind::Pstar, RegionKind::Qstar, HopLaw::LinearForm)?);
    hops.push(Hop::pi_beta(f, false, RegionKind::Qstar));
    if closing == 2 {
        hops.push(Hop::pi_beta(f, false, RegionKind::Pstar));
    }
    Ok(hops)
}

/// Concatenation of the hop words.
pub fn route_word<K: Field>(field: &K, hops: &[Hop<K>]) -> Word<K> {
    hops.iter().fold(Word::empty(field), |w, h| w.then(&h.word))
}

// ---------------------------------------------------------------------------
// Sampled checks

pub(crate) fn sample_star<K: BaseField>(
    field: &K,
    kind: RegionKind,
    params: RegionParams,
    seed: u64,
    index: usize,
    budget: Budget,
) -> Result<Polynomial<K>> {
    let mut rng = sample_rng(seed, index as u64);
    random_star_element(field, kind, params, DENSITIES[index % DENSITIES.len()], &mut rng, budget)
}

pub(crate) fn hop_outcome<K: BaseField>(
    hop: &Hop<K>,
    hop_index: usize,
    params: RegionParams,
    seed: u64,
    index: usize,
    budget: Budget,
) -> Outcome {
    let label = format!("hop {hop_index} [{}] sample {index} on {}{}", hop.word, hop.input, params);
    let field = hop.map.field();
    let result = sample_star(field, hop.input, params, seed, index, budget)
        .and_then(|p| hop.apply(hop_index, &p, params, budget));
    match result {
        Ok(_) => Outcome::Pass,
        Err(e) => Outcome::from_error(e, label, "hop"),
    }
}

/// `(Q*_{m,n}) pi gamma < P*_{m,n}` and `(P*_{m,n}) pi gamma < P*_{4m,n}`
/// for a `beta`-shaped `gamma`, on `samples` seeded inputs of each kind.
pub fn check_q_to_p<K: BaseField>(
    gamma: &Endomorphism<K>,
    params: RegionParams,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<VerificationReport> {
    if !is_beta_shaped(gamma) {
        return Err(Error::Precondition(format!("{gamma} is not beta-shaped")));
    }
    let f = gamma.field();
    let word = Word::new(f, vec![Atom::Pi, Atom::Raw(gamma.clone())]);
    let q_hop = Hop::new(word.clone(), RegionKind::Qstar, RegionKind::Pstar, HopLaw::Preserve)?;
    let p_hop = Hop::new(word, RegionKind::Pstar, RegionKind::Pstar, HopLaw::Quadruple)?;
    let mut report = VerificationReport::new(
        "qtop",
        f.spec(),
        Some(seed),
        json!({ "gamma": gamma.to_string(), "m": params.m, "n": params.n }),
    );
    for (i, hop) in [q_hop, p_hop].iter().enumerate() {
        report.record_all(run_samples(samples, |s| hop_outcome(hop, i, params, seed ^ (i as u64) << 32, s, budget)));
    }
    Ok(report)
}

/// The stratum proposition for `level` on `samples` members of `P*_{m,n}`:
/// the image lies in `Q*_{m',n'}` with `(m', n')` from [`linear_form_law`],
/// and `m' >= m`.
pub fn check_strata_proposition<K: BaseField>(
    level: Stratum,
    alpha: &AffineMap<K>,
    params: RegionParams,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<VerificationReport> {
    let got = classify(alpha).stratum;
    if got != level {
        return Err(Error::StratumMismatch { expected: level.to_string(), got: got.to_string() });
    }
    let hop = Hop::new(proposition_word(level, alpha)?, RegionKind::Pstar, RegionKind::Qstar, HopLaw::LinearForm)?;
    let predicted = hop.predict(params)?;
    let mut report = VerificationReport::new(
        "strata",
        alpha.field().spec(),
        Some(seed),
        json!({ "level": level, "alpha": alpha.to_string(), "m": params.m, "n": params.n }),
    );
    report.details = json!({ "word": hop.word.to_string(), "predicted": predicted });
    report.claim(predicted.m >= params.m, || {
        Counterexample::new(alpha.to_string(), "m' >= m", format!(">= {}", params.m), predicted.m)
    });
    report.record_all(run_samples(samples, |s| hop_outcome(&hop, 0, params, seed, s, budget)));
    Ok(report)
}

/// Carries one concrete polynomial through `hops` while it stays within
/// `witness_terms`; returns the parameters reached after each completed hop.
pub fn chain_witness<K: Field>(
    hops: &[Hop<K>],
    start: Polynomial<K>,
    params: RegionParams,
    witness_terms: usize,
    budget: Budget,
) -> Result<Vec<RegionParams>> {
    let mut cur = start;
    let mut cur_params = params;
    let mut trail = Vec::new();
    for (i, hop) in hops.iter().enumerate() {
        let (next, next_params) = match hop.apply(i, &cur, cur_params, Budget::terms(witness_terms)) {
            Err(e) if e.is_budget() => break,
            other => other?,
        };
        budget.check(next.len())?;
        trail.push(next_params);
        cur = next;
        cur_params = next_params;
    }
    Ok(trail)
}

/// The theorem for one `alpha` outside `A4`: stability of `P*` under
/// `pi beta` and `pi beta^-1`, and under the theorem word through the
/// stratum's hop route, each hop checked on `samples` seeded members of its
/// input family at `params`.
pub fn check_theorem_stability<K: BaseField>(
    alpha: &AffineMap<K>,
    params: RegionParams,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<VerificationReport> {
    let f = alpha.field();
    let route = theorem_route(alpha)?;
    let level = classify(alpha).stratum;
    let mut report = VerificationReport::new(
        "theorem",
        f.spec(),
        Some(seed),
        json!({ "alpha": alpha.to_string(), "level": level, "m": params.m, "n": params.n }),
    );

    let generators = [Hop::pi_beta(f, false, RegionKind::Pstar), Hop::pi_beta(f, true, RegionKind::Pstar)];
    for (g, hop) in generators.iter().enumerate() {
        let s = seed.wrapping_add(1000 + g as u64);
        report.record_all(run_samples(samples, |i| hop_outcome(hop, 0, params, s, i, budget)));
    }

    let full = theorem_word(alpha).free_reduce();
    let routed = route_word(f, &route).free_reduce();
    report.claim(full == routed, || Counterexample::new(alpha.to_string(), "route word", &full, &routed));

    for (h, hop) in route.iter().enumerate() {
        let s = seed.wrapping_add(h as u64);
        report.record_all(run_samples(samples, |i| hop_outcome(hop, h, params, s, i, budget)));
    }

    let mut law = vec![params];
    for hop in &route {
        let next = hop.predict(*law.last().expect("nonempty"))?;
        law.push(next);
    }
    let start = sample_star(f, RegionKind::Pstar, params, seed, 0, budget)?;
    let chained = match chain_witness(&route, start, params, 5_000, budget) {
        Ok(trail) => trail.len(),
        Err(e) => {
            report.record(Outcome::from_error(e, "chained witness", "chain"));
            0
        }
    };
    report.details = json!({
        "route": route.iter().map(|h| h.word.to_string()).collect::<Vec<_>>(),
        "law": law,
        "chained_hops": chained,
    });
    Ok(report)
}

/// Applies `pi beta` to `y` `hops` times, asserting that the `t`-th image is
/// in `P*_{4^(t-1),0}`.
pub fn check_pi_beta_chain<K: BaseField>(field: &K, hops: usize, budget: Budget) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("pi-beta-chain", field.spec(), None, json!({ "hops": hops }));
    let pb = pi(field).compose(&beta(field), Budget::UNLIMITED)?;
    let mut cur = Polynomial::y(field);
    let mut trail = Vec::new();
    for t in 1..=hops {
        cur = match pb.apply(&cur, budget) {
            Ok(p) => p,
            Err(e) => {
                report.record(Outcome::from_error(e, format!("hop {t}"), "apply"));
                break;
            }
        };
        let expected = RegionParams::new(4u64.pow(t as u32 - 1), 0)?;
        let got = infer_star_params(&cur, RegionKind::Pstar);
        report.claim(got == Some(expected), || {
            Counterexample::new(format!("hop {t}"), "P* parameters", expected, format!("{got:?}"))
        });
        trail.push(json!({ "hop": t, "m": got.map(|p| p.m), "terms": cur.len() }));
    }
    report.details = json!({ "trail": trail });
    Ok(report)
}

// ---------------------------------------------------------------------------
// Non-triangular affine maps: the fifteen exponent patterns

/// For each component of `alpha`, the first variable with a nonzero
/// coefficient (0 = x, 1 = y, 2 = z).
pub fn leading_pattern<K: Field>(alpha: &AffineMap<K>) -> [usize; 3] {
    let f = alpha.field();
    std::array::from_fn(|r| {
        (0..3).find(|&c| !f.is_zero(&alpha.matrix()[r][c])).expect("invertible matrices have no zero row")
    })
}

/// The fifteen admissible leading patterns of a non-triangular invertible
/// affine map; pattern `p` sends `x^v` to the triple whose `c`-th entry is
/// the sum of the `v_r` with `p[r] = c`.
pub const FIFTEEN_PATTERNS: [[usize; 3]; 15] = [
    [0, 0, 0], // (i+j+k, 0, 0)
    [0, 0, 1], // (i+j, k, 0)
    [0, 0, 2], // (i+j, 0, k)
    [0, 1, 0], // (i+k, j, 0)
    [0, 2, 0], // (i+k, 0, j)
    [1, 0, 0], // (j+k, i, 0)
    [2, 0, 0], // (j+k, 0, i)
    [0, 2, 1], // (i, k, j)
    [1, 0, 2], // (j, i, k)
    [2, 0, 1], // (j, k, i)
    [1, 2, 0], // (k, i, j)
    [2, 1, 0], // (k, j, i)
    [0, 1, 1], // (i, j+k, 0)
    [1, 0, 1], // (j, i+k, 0)
    [1, 1, 0], // (k, i+j, 0)
];

pub fn pattern_triple(pattern: [usize; 3], v: &Monomial) -> [u32; 3] {
    let mut out = [0; 3];
    for (r, e) in v.exps().iter().enumerate() {
        out[pattern[r]] += e;
    }
    out
}

fn degree_of_product(degs: &[DegreeValue; 3], e: [u32; 3]) -> DegreeValue {
    let mut acc: Option<DegreeValue> = None;
    for (d, &count) in degs.iter().zip(&e) {
        for _ in 0..count {
            acc = Some(match acc {
                None => *d,
                Some(a) => a.add(d),
            });
        }
    }
    acc.unwrap_or_else(|| match degs[0] {
        DegreeValue::Lex { order, .. } => DegreeValue::Lex { order, v: Monomial::ONE },
        _ => DegreeValue::Weighted(0),
    })
}

/// For a non-triangular `alpha`: its leading pattern is one of the fifteen,
/// and for every `v` in `P_{m,n}` and every registered degree function,
/// `deg((x^v) alpha beta) = deg(X^i' Y^j' Z^k')` with `(i',j',k')` the
/// pattern's triple.
pub fn check_fifteen_triples<K: Field>(
    alpha: &AffineMap<K>,
    params: RegionParams,
    budget: Budget,
) -> Result<VerificationReport> {
    let f = alpha.field();
    let got = classify(alpha).stratum;
    if got != Stratum::A0A1 {
        return Err(Error::StratumMismatch { expected: Stratum::A0A1.to_string(), got: got.to_string() });
    }
    let mut report = VerificationReport::new(
        "fifteen-triples",
        f.spec(),
        None,
        json!({ "alpha": alpha.to_string(), "m": params.m, "n": params.n }),
    );
    let pattern = leading_pattern(alpha);
    report.claim(FIFTEEN_PATTERNS.contains(&pattern), || {
        Counterexample::new(alpha.to_string(), "leading pattern", "one of the fifteen", format!("{pattern:?}"))
    });
    let ab = alpha.to_endomorphism().compose(&beta(f), budget)?;
    let b = beta(f);
    let fns: Vec<DegreeFn> =
        DegreeFn::registered().into_iter().filter(crate::degree::check_beta_lexicographic).collect();
    for v in enumerate_region(RegionKind::P, params, budget)?.iter() {
        let img = ab.apply(&Polynomial::monomial(f, *v, f.one()), budget)?;
        let triple = pattern_triple(pattern, v);
        for deg in &fns {
            let expected = degree_of_product(&b.degrees(deg), triple);
            let actual = deg.eval(&img);
            report.claim(actual == expected, || {
                Counterexample::new(format!("x^{v} under {deg}"), "degree", expected, actual)
            });
        }
    }
    report.details = json!({ "pattern": pattern });
    Ok(report)
}

// ---------------------------------------------------------------------------
// Triangular conjugation formulas

/// Closed-form components of `beta^-1 alpha beta` for triangular
/// `alpha = (a1 x + b1 y + c1 z + d1, b2 y + c2 z + d2, c3 z + d3)`.
#[derive(Clone, Debug)]
pub struct TriangularConjugationData<K: Field> {
    pub e: K::Elem,
    pub f: K::Elem,
    pub g: K::Elem,
    /// `Z1`, `Z2`, `Z3`: polynomials in `z` of degree at most 2.
    pub z_aux: [Polynomial<K>; 3],
    /// `F0` through `F4`: polynomials in `z`.
    pub coeffs: [Polynomial<K>; 5],
    /// The assembled `(X, Y, Z)`.
    pub formula: Endomorphism<K>,
}

/// Builds the closed forms
/// `Z = c3 z + d3`, `Y = b2 y + e z^2 + f z + g`,
/// `X = a1 x + F4 y^4 + F3 y^3 + F2 y^2 + F1 y + F0` with
/// `e = b2 - c3^2`, `f = c2 - 2 c3 d3`, `g = d2 - d3^2`,
/// `Z1 = b1 z^2 + c1 z + d1`, `Z2 = b2 z^2 + c2 z + d2`, `Z3 = e z^2 + f z + g`,
/// `F4 = a1 - b2^4`, `F3 = 2 (a1 z^2 - b2^3 (Z2 + Z3))`,
/// `F2 = a1 z^4 - b2^2 (Z2^2 + 4 Z2 Z3 + Z3^2)`,
/// `F1 = b1 - 2 b2 (Z2 + Z3) Z2 Z3`, `F0 = Z1 - Z2^2 Z3^2`.
pub fn triangular_conjugation_data<K: Field>(alpha: &AffineMap<K>) -> Result<TriangularConjugationData<K>> {
    if !alpha.is_triangular() {
        return Err(Error::NotTriangular(alpha.to_string()));
    }
    let fl = alpha.field();
    let m = alpha.matrix();
    let t = alpha.translation();
    let (a1, b1, c1, d1) = (&m[0][0], &m[0][1], &m[0][2], &t[0]);
    let (b2, c2, d2) = (&m[1][1], &m[1][2], &t[1]);
    let (c3, d3) = (&m[2][2], &t[2]);
    let two = fl.from_i64(2);
    let e = fl.sub(b2, &fl.mul(c3, c3));
    let f = fl.sub(c2, &fl.mul(&two, &fl.mul(c3, d3)));
    let g = fl.sub(d2, &fl.mul(d3, d3));

    let k = |c: &K::Elem| Polynomial::constant(fl, c.clone());
    let z = Polynomial::z(fl);
    let y = Polynomial::y(fl);
    let z2 = &z * &z;
    let quad = |a: &K::Elem, b: &K::Elem, c: &K::Elem| &(&(&k(a) * &z2) + &(&k(b) * &z)) + &k(c);
    let zz1 = quad(b1, c1, d1);
    let zz2 = quad(b2, c2, d2);
    let zz3 = quad(&e, &f, &g);

    let f4 = k(&fl.sub(a1, &fl.pow(b2, 4)));
    let f3 = &k(&two) * &(&(&k(a1) * &z2) - &(&k(&fl.pow(b2, 3)) * &(&zz2 + &zz3)));
    let f2 = &(&k(a1) * &z2.pow(2)?)
        - &(&k(&fl.pow(b2, 2)) * &(&(&zz2.pow(2)? + &(&k(&fl.from_i64(4)) * &(&zz2 * &zz3))) + &zz3.pow(2)?));
    let f1 = &k(b1) - &(&(&k(&fl.mul(&two, b2)) * &(&zz2 + &zz3)) * &(&zz2 * &zz3));
    let f0 = &zz1 - &(&zz2.pow(2)? * &zz3.pow(2)?);

    let x_part = &k(a1) * &Polynomial::x(fl);
    let big_x = [(&f4, 4u32), (&f3, 3), (&f2, 2), (&f1, 1), (&f0, 0)]
        .iter()
        .try_fold(x_part, |acc, (c, e)| Ok::<_, Error>(&acc + &(*c * &y.pow(*e)?)))?;
    let big_y = &(&k(b2) * &y) + &zz3;
    let big_z = &(&k(c3) * &z) + &k(d3);
    Ok(TriangularConjugationData {
        e,
        f,
        g,
        z_aux: [zz1, zz2, zz3],
        coeffs: [f0, f1, f2, f3, f4],
        formula: Endomorphism::new([big_x, big_y, big_z]),
    })
}

/// Compares a machine-computed composite with its closed form, component by
/// component, for `alpha` in the given stratum.
///
/// * `A1A2`: `beta^-1 alpha beta` against [`triangular_conjugation_data`],
///   plus the hypotheses used downstream: `ldeg_2(X) = (0,b,c)` with
///   `b >= 1`, `deg_(3,3,1)(X) = 3b + c` and `deg_(3,3,1)(Y) = 3`.
/// * `A2A3`: `pi beta^-1 alpha beta pi beta` against
///   `(u^2 X, u^8 Y + b1 X + b1 z^2 + c1 z + d1, u z)` with `(X, Y, z) = beta`.
/// * `A3A4`: `pi beta^-1 alpha beta pi` against `(u^2 x, u^8 y + c1 z + d1, u z)`.
pub fn conjugation_formula_check<K: Field>(level: Stratum, alpha: &AffineMap<K>) -> Result<VerificationReport> {
    let got = classify(alpha);
    if got.stratum != level {
        return Err(Error::StratumMismatch { expected: level.to_string(), got: got.stratum.to_string() });
    }
    let fl = alpha.field();
    let a = Atom::Affine(alpha.clone());
    use Atom::*;
    let (word, formula) = match level {
        Stratum::A1A2 => (vec![BetaInv, a, Beta], triangular_conjugation_data(alpha)?.formula),
        Stratum::A2A3 | Stratum::A3A4 => {
            let p = got.params.expect("A2 members carry parameters");
            let k = |c: &K::Elem| Polynomial::constant(fl, c.clone());
            let (u2, u8) = (fl.mul(&p.u, &p.u), fl.pow(&p.u, 8));
            let z = Polynomial::z(fl);
            let tail = &(&k(&p.c) * &z) + &k(&p.d);
            if level == Stratum::A2A3 {
                let [bx, by, _] = crate::word::beta_components(fl);
                let first = &k(&u2) * &bx;
                let second = &(&(&k(&u8) * &by) + &(&k(&p.b) * &bx)) + &(&(&k(&p.b) * &(&z * &z)) + &tail);
                (vec![Pi, BetaInv, a, Beta, Pi, Beta], Endomorphism::new([first, second, &k(&p.u) * &z]))
            } else {
                let first = &k(&u2) * &Polynomial::x(fl);
                let second = &(&k(&u8) * &Polynomial::y(fl)) + &tail;
                (vec![Pi, BetaInv, a, Beta, Pi], Endomorphism::new([first, second, &k(&p.u) * &z]))
            }
        }
        other => return Err(Error::Precondition(format!("no conjugation formula for {other}"))),
    };
    let word = Word::new(fl, word);
    let computed = word.to_endomorphism(Budget::UNLIMITED)?;
    let mut report =
        VerificationReport::new("conjugation", fl.spec(), None, json!({ "level": level, "alpha": alpha.to_string() }));
    for r in 0..3 {
        let (c, e) = (&computed.components()[r], &formula.components()[r]);
        report.claim(c == e, || Counterexample::new(word.to_string(), format!("component {}", r + 1), e, c));
    }
    if level == Stratum::A1A2 {
        let [x, y, _] = computed.components();
        let l2 = ldeg(x, 2).unwrap_or(Monomial::ONE);
        let (b, c) = (l2.j as u64, l2.k as u64);
        let dx = x.weighted_degree([3, 3, 1]).unwrap_or(0);
        let dy = y.weighted_degree([3, 3, 1]).unwrap_or(0);
        report.claim(l2.i == 0 && b >= 1, || Counterexample::new(alpha.to_string(), "ldeg2(X)", "(0,b,c), b >= 1", l2));
        report.claim(dx == 3 * b + c, || Counterexample::new(alpha.to_string(), "deg331(X)", 3 * b + c, dx));
        report.claim(dy == 3, || Counterexample::new(alpha.to_string(), "deg331(Y)", 3, dy));
        report.details = json!({ "ldeg2_X": l2, "deg331_X": dx, "deg331_Y": dy });
    }
    Ok(report)
}
