//! Named batches of checks, each producing reports in a fixed order.

use serde_json::json;

use crate::affine::AffineMap;
use crate::certify::{
    amalgam_nontriviality, build_certificate, centralizer_report, excluded_by_degree_bound, AlternatingWord,
    CertificateMode,
};
use crate::degree::{check_beta_lexicographic, DegreeFn, DegreeValue};
use crate::endomorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::field::{BaseField, Rationals};
use crate::monomial::Monomial;
use crate::poly::{Budget, Polynomial};
use crate::region::{
    cub_closure, enumerate_region, in_region, poly_in_star, random_star_element, region_size, RegionKind, RegionParams,
};
use crate::report::{sample_rng, Counterexample, Outcome, VerificationReport};
use crate::stability::{
    beta_shape_reference, check_fifteen_triples, check_lemma_grid, check_pi_beta_chain, check_q_to_p,
    check_strata_proposition, check_theorem_stability, conjugation_formula_check, is_beta_shaped, shape_table,
    DENSITIES,
};
use crate::strata::{centralizer_elements, random_in_stratum, Stratum};
use crate::word::{beta, beta_components, beta_inv, pi};

pub const SUITES: [&str; 9] =
    ["degrees", "regions", "lemma-max", "qtop", "strata", "theorem", "certify", "centralizer", "all"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub m: u64,
    pub n: u64,
    pub samples: usize,
    pub seed: u64,
    pub budget: Budget,
    /// `N` of `theta_N`.
    pub theta: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { m: 2, n: 1, samples: 10, seed: 0, budget: Budget::terms(5_000_000), theta: 3 }
    }
}

impl SuiteOptions {
    fn params(&self) -> Result<RegionParams> {
        RegionParams::new(self.m, self.n)
    }
}

/// Runs one suite (or `all`), returning its reports in a fixed order.
pub fn run_suite<K: BaseField>(field: &K, name: &str, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    match name {
        "degrees" => degrees_suite(field),
        "regions" => regions_suite(field, opts),
        "lemma-max" => Ok(vec![check_lemma_grid(12, opts.m, opts.n, opts.budget)?]),
        "qtop" => qtop_suite(field, opts),
        "strata" => strata_suite(field, opts),
        "theorem" => theorem_suite(field, opts),
        "certify" => certify_suite(field, opts),
        "centralizer" => Ok(vec![centralizer_report(field, opts.theta, opts.samples.max(1), opts.seed)?]),
        "all" => {
            let mut out = Vec::new();
            for s in &SUITES[..SUITES.len() - 1] {
                out.extend(run_suite(field, s, opts)?);
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParameter(format!("unknown suite `{name}`"))),
    }
}

/// `x^v` with `v = (i, j, k)`.
fn mono(i: u32, j: u32, k: u32) -> Monomial {
    Monomial::new(i, j, k)
}

fn degrees_suite<K: BaseField>(field: &K) -> Result<Vec<VerificationReport>> {
    let spec = field.spec();
    let mut example = VerificationReport::new("degree-example", spec, None, json!({ "P": "x + y^2*(y + z^2)^2" }));
    let [x, _, _] = beta_components(field);
    let expected = [
        DegreeValue::Weighted(4),
        DegreeValue::Weighted(4),
        DegreeValue::Weighted(8),
        DegreeValue::Lex { order: 1, v: mono(1, 0, 0) },
        DegreeValue::Lex { order: 2, v: mono(0, 4, 0) },
        DegreeValue::Lex { order: 3, v: mono(0, 2, 4) },
    ];
    for (deg, want) in crate::stability::shape_degree_fns().iter().zip(expected) {
        let got = deg.eval(&x);
        example.claim(got == want, || Counterexample::new(x.to_string(), deg.to_string(), want, got));
    }

    let mut table = VerificationReport::new("beta-shaped", spec, None, json!({}));
    let reference = beta_shape_reference();
    for (name, g) in [("beta", beta(field)), ("beta_inv", beta_inv(field))] {
        let got = shape_table(&g);
        for r in 0..3 {
            for c in 0..6 {
                table.claim(got[r][c] == reference[r][c], || {
                    Counterexample::new(name, format!("row {} column {}", r + 1, c + 1), reference[r][c], got[r][c])
                });
            }
        }
    }
    table.claim(!is_beta_shaped(&pi(field)), || Counterexample::new("pi", "beta-shaped", false, true));

    let mut lex = VerificationReport::new("beta-lexicographic", spec, None, json!({}));
    let registered: Vec<String> = DegreeFn::registered().iter().map(ToString::to_string).collect();
    for deg in DegreeFn::registered() {
        lex.claim(check_beta_lexicographic(&deg), || {
            Counterexample::new(deg.to_string(), "deg X > deg Y > deg Z", true, false)
        });
    }
    lex.details = json!({ "registered": registered });
    Ok(vec![example, table, lex])
}

/// Lattice points of `kind` by scanning a bounding box.
fn box_count(kind: RegionKind, params: RegionParams) -> u64 {
    let bound = (8 * params.m + params.n) as u32;
    let mut count = 0;
    for i in 0..=bound {
        for j in 0..=bound {
            for k in 0..=bound {
                if in_region(&mono(i, j, k), kind, params) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn regions_suite<K: BaseField>(field: &K, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let spec = field.spec();
    let (mmax, nmax) = (opts.m, opts.n);
    let mut sizes = VerificationReport::new("region-sizes", spec, None, json!({ "m": mmax, "n": nmax }));
    let mut inclusion = VerificationReport::new("p-in-q", spec, None, json!({ "m": mmax, "n": nmax }));
    let mut cub = VerificationReport::new(
        "cub-closure",
        crate::field::FieldSpec::Rationals,
        None,
        json!({ "m": mmax, "n": nmax }),
    );
    let mut example = VerificationReport::new("xmzn-beta", spec, None, json!({ "m": mmax, "n": nmax }));
    let b = beta(field);
    let q = Rationals;
    let xq = beta_components(&q)[0].clone();
    for m in 1..=mmax {
        for n in 0..=nmax {
            let params = RegionParams::new(m, n)?;
            for kind in [RegionKind::P, RegionKind::Q] {
                let (fast, oracle) = (region_size(kind, params), box_count(kind, params));
                let listed = enumerate_region(kind, params, opts.budget)?.len() as u64;
                sizes.claim(fast == oracle && listed == oracle, || {
                    Counterexample::new(format!("{kind}{params}"), "size", oracle, format!("{fast}/{listed}"))
                });
            }
            let big = RegionParams::new(4 * m, n)?;
            let outside = enumerate_region(RegionKind::P, params, opts.budget)?
                .iter()
                .find(|v| !in_region(v, RegionKind::Q, big))
                .copied();
            inclusion.claim(outside.is_none(), || {
                Counterexample::new(
                    format!("P{params}"),
                    format!("inside Q{big}"),
                    "all points",
                    format!("{outside:?}"),
                )
            });

            let p = &xq.pow(m as u32)? * &Polynomial::z(&q).pow(n as u32)?;
            let closure = cub_closure(p.support().iter());
            let region: std::collections::BTreeSet<Monomial> =
                enumerate_region(RegionKind::P, params, opts.budget)?.iter().copied().collect();
            cub.claim(closure == region, || {
                Counterexample::new(format!("X^{m} z^{n}"), "cub(supp)", region.len(), closure.len())
            });

            let xz = Polynomial::monomial(field, mono(m as u32, 0, n as u32), field.one());
            let img = b.apply(&xz, opts.budget)?;
            example.claim(poly_in_star(&img, RegionKind::Pstar, params), || {
                Counterexample::new(format!("x^{m} z^{n}"), format!("in P*{params}"), true, false)
            });
        }
    }

    let mut degree =
        VerificationReport::new("pstar-total-degree", spec, Some(opts.seed), json!({ "m": mmax, "n": nmax }));
    for m in 1..=mmax {
        for n in 0..=nmax {
            let params = RegionParams::new(m, n)?;
            for s in 0..opts.samples {
                let mut rng = sample_rng(opts.seed, s as u64);
                let p = random_star_element(field, RegionKind::Pstar, params, DENSITIES[s % 3], &mut rng, opts.budget)?;
                let d = p.total_degree().unwrap_or(0);
                degree.claim(d >= 6 * m + n, || {
                    Counterexample::new(
                        format!("sample {s} of P*{params}"),
                        "total degree",
                        format!(">= {}", 6 * m + n),
                        d,
                    )
                });
            }
        }
    }
    Ok(vec![sizes, inclusion, cub, example, degree])
}

fn qtop_suite<K: BaseField>(field: &K, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let params = opts.params()?;
    Ok(vec![
        check_q_to_p(&beta(field), params, opts.samples, opts.seed, opts.budget)?,
        check_q_to_p(&beta_inv(field), params, opts.samples, opts.seed, opts.budget)?,
    ])
}

/// Fixed examples in each stratum (valid in every characteristic), then
/// seeded random members, `count` in total.
pub fn stratum_examples<K: BaseField>(field: &K, level: Stratum, count: usize, seed: u64) -> Vec<AffineMap<K>> {
    let fixed = match level {
        Stratum::A0A1 => vec![Ok(AffineMap::pi(field))],
        Stratum::A1A2 => vec![AffineMap::from_i64(field, [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 1])],
        Stratum::A2A3 => vec![AffineMap::from_i64(field, [[1, 1, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 0])],
        Stratum::A3A4 => vec![AffineMap::from_i64(field, [[1, 0, 1], [0, 1, 0], [0, 0, 1]], [0, 0, 0])],
        _ => vec![],
    };
    let mut out: Vec<AffineMap<K>> = fixed.into_iter().filter_map(|a| a.ok()).take(count).collect();
    let mut rng = sample_rng(seed, level as u64);
    while out.len() < count {
        out.push(random_in_stratum(field, level, &mut rng));
    }
    out
}

fn strata_suite<K: BaseField>(field: &K, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let params = opts.params()?;
    let mut out = Vec::new();
    for level in Stratum::LEVELS {
        for (i, alpha) in stratum_examples(field, level, 5, opts.seed).iter().enumerate() {
            let seed = opts.seed.wrapping_add(i as u64);
            out.push(check_strata_proposition(level, alpha, params, opts.samples, seed, opts.budget)?);
            if level == Stratum::A0A1 {
                // the pattern check enumerates all of P, so keep it small
                let small = RegionParams::new(1, params.n.min(1))?;
                out.push(check_fifteen_triples(alpha, small, opts.budget)?);
            } else {
                out.push(conjugation_formula_check(level, alpha)?);
            }
        }
    }
    Ok(out)
}

fn theorem_suite<K: BaseField>(field: &K, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let params = RegionParams::new(1, 0)?;
    let mut out = Vec::new();
    for level in Stratum::LEVELS {
        for alpha in stratum_examples(field, level, 3, opts.seed) {
            out.push(check_theorem_stability(&alpha, params, opts.samples, opts.seed, opts.budget)?);
        }
    }
    out.push(check_pi_beta_chain(field, 3, opts.budget)?);
    Ok(out)
}

fn certificate_report<K: BaseField>(
    w: &AlternatingWord<K>,
    mode: CertificateMode,
    seed: u64,
    budget: Budget,
) -> VerificationReport {
    let mut report = VerificationReport::new(
        "certificate",
        w.field().spec(),
        Some(seed),
        json!({ "word": w.to_string(), "N": w.n, "r": w.r(), "mode": mode }),
    );
    if w.n < 3 {
        report.note("N < 3: exploratory, stability is only claimed for N >= 3");
    }
    match build_certificate(w, mode, seed, budget) {
        Ok(c) => {
            report.record(Outcome::Pass);
            report.details = c.to_json();
        }
        Err(e) => report.record(Outcome::from_error(e, w.to_string(), "certificate")),
    }
    report
}

fn certify_suite<K: BaseField>(field: &K, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let id = AffineMap::identity(field);
    let n = opts.theta;
    let mut out = Vec::new();
    let eager = AlternatingWord::new(2, vec![id.clone(), id.clone()])?;
    out.push(certificate_report(&eager, CertificateMode::Eager, opts.seed, opts.budget));
    let single = AlternatingWord::new(n, vec![id.clone(), id.clone()])?;
    out.push(certificate_report(&single, CertificateMode::Stepwise, opts.seed, opts.budget));
    for level in Stratum::LEVELS {
        for alpha in stratum_examples(field, level, 1, opts.seed) {
            let mut rng = sample_rng(opts.seed, 77);
            let outer =
                [random_in_stratum(field, Stratum::A0A1, &mut rng), random_in_stratum(field, Stratum::A0A1, &mut rng)];
            let w = AlternatingWord::new(n, vec![outer[0].clone(), alpha, outer[1].clone()])?;
            out.push(certificate_report(&w, CertificateMode::Stepwise, opts.seed, opts.budget));
        }
    }

    let mut amalgam = VerificationReport::new("amalgam", field.spec(), Some(opts.seed), json!({ "N": n }));
    let cs = centralizer_elements(field);
    let c_last = cs.last().cloned().unwrap_or_else(|| id.clone());
    let cases =
        [(vec![id.clone()], vec![]), (vec![id.clone(), c_last], stratum_examples(field, Stratum::A2A3, 1, opts.seed))];
    for (c, a) in cases {
        let label = format!("{} rho, {} alpha", c.len(), a.len());
        match amalgam_nontriviality(n, &c, &a, opts.seed, opts.budget) {
            Ok(ok) => amalgam.claim(ok, || Counterexample::new(label.clone(), "nontrivial", true, false)),
            Err(e) => amalgam.record(Outcome::from_error(e, label, "certificate")),
        }
    }
    out.push(amalgam);

    let mut bound = VerificationReport::new("degree-bound", field.spec(), None, json!({ "N": n }));
    let (x, y, z) = (Polynomial::x(field), Polynomial::y(field), Polynomial::z(field));
    let sq = Endomorphism::new([&x + &(&y * &y), y.clone(), z.clone()]);
    bound.claim(excluded_by_degree_bound(&sq), || Counterexample::new(sq.to_string(), "excluded", true, false));
    let aff = pi(field);
    bound.claim(!excluded_by_degree_bound(&aff), || Counterexample::new(aff.to_string(), "excluded", false, true));
    let y6 = Endomorphism::new([&x + &y.pow(6)?, y, z]);
    bound.claim(!excluded_by_degree_bound(&y6), || Counterexample::new(y6.to_string(), "excluded", false, true));
    out.push(bound);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn degrees_and_regions_pass() {
        let f = PrimeField::new(101).unwrap();
        let opts = SuiteOptions { m: 2, n: 2, samples: 3, ..Default::default() };
        for r in run_suite(&f, "degrees", &opts).unwrap().into_iter().chain(run_suite(&f, "regions", &opts).unwrap()) {
            assert!(r.passed(), "{}", r.to_json_line());
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite(&Rationals, "nope", &SuiteOptions::default()).is_err());
    }
}
