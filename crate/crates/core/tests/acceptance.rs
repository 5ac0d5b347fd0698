//! Exit gate: one PASS/FAIL line per acceptance criterion, each with its
//! wall-clock limit. Values are checked against literals or oracles written
//! here, independent of the library's own reference tables.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use cotame::certify::{
    build_certificate, centralizer_report, excluded_by_degree_bound, AlternatingWord, CertificateMode, HopEvidence,
    AGREEMENT_POINTS,
};
use cotame::region::{cub_closure, enumerate_region, random_star_element, region_size, RegionKind, RegionParams};
use cotame::report::sample_rng;
use cotame::stability::{
    check_lemma_grid, check_pi_beta_chain, check_q_to_p, check_strata_proposition, check_theorem_stability,
    conjugation_formula_check, shape_degree_fns, DENSITIES,
};
use cotame::strata::random_in_stratum;
use cotame::suite::stratum_examples;
use cotame::word::{beta, beta_components, beta_inv, pi};
use cotame::{
    AffineMap, Atom, BaseField, Budget, DegreeValue, Endomorphism, Field, Monomial, Polynomial, PrimeField, Rationals,
    Stratum, Word,
};

type Check = std::result::Result<String, String>;

/// Number, name, time limit and check.
type Criterion = (u32, &'static str, Duration, fn() -> Check);

const BUDGET: usize = 5_000_000;

fn budget() -> Budget {
    Budget::terms(BUDGET)
}

fn f101() -> PrimeField {
    PrimeField::new(101).unwrap()
}

fn params(m: u64, n: u64) -> RegionParams {
    RegionParams::new(m, n).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: cotame::Error) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Oracles

fn in_p(v: [u64; 3], m: u64, n: u64) -> bool {
    let [i, j, k] = v;
    4 * i + j <= 4 * m && 4 * i + k <= 4 * m + n && 8 * i + 2 * j + k <= 8 * m + n
}

fn in_q(v: [u64; 3], m: u64, n: u64) -> bool {
    let [i, j, k] = v;
    i + j <= m && 3 * i + 3 * j + k <= 3 * m + n
}

fn exps(v: &Monomial) -> [u64; 3] {
    v.exps().map(u64::from)
}

/// Largest support vector, comparing coordinates from `start` cyclically.
fn lex_max<K: Field>(p: &Polynomial<K>, start: usize) -> Option<[u64; 3]> {
    p.support().iter().map(exps).max_by_key(|v| (v[start % 3], v[(start + 1) % 3], v[(start + 2) % 3]))
}

fn weighted<K: Field>(p: &Polynomial<K>, w: [u64; 3]) -> Option<u64> {
    p.support().iter().map(|v| exps(v).iter().zip(w).map(|(a, b)| a * b).sum()).max()
}

fn in_pstar_oracle<K: Field>(p: &Polynomial<K>, m: u64, n: u64) -> bool {
    !p.is_zero()
        && p.support().iter().all(|v| in_p(exps(v), m, n))
        && lex_max(p, 1) == Some([0, 4 * m, n])
        && lex_max(p, 2) == Some([0, 2 * m, 4 * m + n])
}

fn box_points(bound: u64, keep: impl Fn([u64; 3]) -> bool) -> BTreeSet<[u64; 3]> {
    let mut out = BTreeSet::new();
    for i in 0..=bound {
        for j in 0..=bound {
            for k in 0..=bound {
                if keep([i, j, k]) {
                    out.insert([i, j, k]);
                }
            }
        }
    }
    out
}

fn random_point<K: BaseField>(f: &K, seed: u64, i: u64) -> [K::Elem; 3] {
    let mut rng = sample_rng(seed, i);
    [f.random_elem(&mut rng), f.random_elem(&mut rng), f.random_elem(&mut rng)]
}

// ---------------------------------------------------------------------------
// Criteria

fn degree_tables() -> Check {
    let q = Rationals;
    let x = beta_components(&q)[0].clone();
    let fns = shape_degree_fns();
    let lex = |order: usize, v: (u32, u32, u32)| DegreeValue::Lex { order, v: Monomial::new(v.0, v.1, v.2) };
    let w = DegreeValue::Weighted;
    let example = [w(4), w(4), w(8), lex(1, (1, 0, 0)), lex(2, (0, 4, 0)), lex(3, (0, 2, 4))];
    for (d, want) in fns.iter().zip(&example) {
        let got = d.eval(&x);
        ensure(got == *want, || format!("{d}(P) = {got}, expected {want}"))?;
    }
    // Independent evaluation of the same six values.
    ensure(weighted(&x, [4, 1, 0]) == Some(4) && weighted(&x, [4, 0, 1]) == Some(4), || "oracle weights".into())?;
    ensure(weighted(&x, [8, 2, 1]) == Some(8), || "oracle deg_(8,2,1)".into())?;
    ensure(lex_max(&x, 0) == Some([1, 0, 0]) && lex_max(&x, 1) == Some([0, 4, 0]), || "oracle ldeg".into())?;
    ensure(lex_max(&x, 2) == Some([0, 2, 4]), || "oracle ldeg_3".into())?;

    let table = [
        [w(4), w(4), w(8), lex(1, (1, 0, 0)), lex(2, (0, 4, 0)), lex(3, (0, 2, 4))],
        [w(1), w(2), w(2), lex(1, (0, 1, 0)), lex(2, (0, 1, 0)), lex(3, (0, 0, 2))],
        [w(0), w(1), w(1), lex(1, (0, 0, 1)), lex(2, (0, 0, 1)), lex(3, (0, 0, 1))],
    ];
    let mut entries = 0;
    for (name, g) in [("beta", beta(&q)), ("beta_inv", beta_inv(&q))] {
        for (r, comp) in g.components().iter().enumerate() {
            for (c, d) in fns.iter().enumerate() {
                let got = d.eval(comp);
                ensure(got == table[r][c], || format!("{name} row {r} {d}: {got} != {}", table[r][c]))?;
                entries += 1;
            }
        }
    }
    Ok(format!("6 example values, {entries} table entries"))
}

fn inverse_identity() -> Check {
    fn one<K: BaseField>(f: &K) -> Result<(), String> {
        let (b, bi) = (beta(f), beta_inv(f));
        let bbi = b.compose(&bi, budget()).map_err(err)?;
        let bib = bi.compose(&b, budget()).map_err(err)?;
        ensure(bbi.is_identity(), || format!("beta beta^-1 = {bbi} over {}", f.spec()))?;
        ensure(bib.is_identity(), || format!("beta^-1 beta = {bib} over {}", f.spec()))?;
        for i in 0..50 {
            let p = random_point(f, 2, i);
            ensure(bi.eval(&b.eval(&p)) == p, || format!("pointwise inverse fails at sample {i}"))?;
        }
        Ok(())
    }
    one(&Rationals)?;
    one(&f101())?;
    Ok("exact over q and fp=101".into())
}

fn involutions() -> Check {
    let f = f101();
    let p = pi(&f);
    ensure(p.compose(&p, budget()).map_err(err)?.is_identity(), || "pi^2 != id".into())?;
    let theta = Word::theta(&f, 3);
    let tt = theta.clone().then(&theta);
    ensure(tt.free_reduce().is_empty(), || format!("theta3 theta3 reduces to {}", tt.free_reduce()))?;
    for i in 0..1000 {
        let x = random_point(&f, 3, i);
        ensure(tt.eval(&x) == x, || format!("theta3^2 moves sample point {i}"))?;
    }
    let q = Rationals;
    let b = beta(&q);
    ensure(!b.compose(&b, budget()).map_err(err)?.is_identity(), || "beta^2 = id over q".into())?;
    let f2 = PrimeField::new(2).unwrap();
    let b2 = beta(&f2);
    ensure(b2.compose(&b2, budget()).map_err(err)?.is_identity(), || "beta^2 != id over fp=2".into())?;
    Ok("pi^2 = id, theta3^2 reduces to empty and fixes 1000 points, beta^2 != id over q, = id over fp=2".into())
}

fn region_facts() -> Check {
    for kind in [RegionKind::P, RegionKind::Q] {
        let keep = |v: [u64; 3]| if kind == RegionKind::P { in_p(v, 1, 0) } else { in_q(v, 1, 0) };
        let oracle = box_points(8, keep).len() as u64;
        let listed = enumerate_region(kind, params(1, 0), budget()).map_err(err)?.len() as u64;
        let counted = region_size(kind, params(1, 0));
        ensure(oracle == listed && oracle == counted, || {
            format!("|{kind}(1,0)|: oracle {oracle}, {listed}, {counted}")
        })?;
    }
    for m in 1..=4 {
        for n in 0..=4 {
            let bound = 8 * m + n;
            let bad = box_points(bound, |v| in_p(v, m, n) && !in_q(v, 4 * m, n));
            ensure(bad.is_empty(), || format!("P({m},{n}) not inside Q({},{n}): {bad:?}", 4 * m))?;
            let lib: BTreeSet<[u64; 3]> =
                enumerate_region(RegionKind::P, params(m, n), budget()).map_err(err)?.iter().map(exps).collect();
            ensure(lib == box_points(bound, |v| in_p(v, m, n)), || format!("P({m},{n}) enumeration"))?;
        }
    }
    let q = Rationals;
    let xb = beta_components(&q)[0].clone();
    for m in 1..=3u64 {
        for n in 0..=3u64 {
            let p = &xb.pow(m as u32).map_err(err)? * &Polynomial::z(&q).pow(n as u32).map_err(err)?;
            let closure: BTreeSet<[u64; 3]> = cub_closure(p.support().iter()).iter().map(exps).collect();
            ensure(closure == box_points(8 * m + n, |v| in_p(v, m, n)), || format!("cub(supp) != P({m},{n})"))?;
        }
    }
    let f = f101();
    let b = beta(&f);
    for m in 1..=5u32 {
        for n in 0..=5u32 {
            let xz = Polynomial::monomial(&f, Monomial::new(m, 0, n), f.one());
            let img = b.apply(&xz, budget()).map_err(err)?;
            ensure(in_pstar_oracle(&img, m.into(), n.into()), || format!("(x^{m} z^{n})beta not in P*({m},{n})"))?;
        }
    }
    Ok("sizes, P in Q_4m (m,n <= 4), cub closure over q (m,n <= 3), (x^m z^n)beta in P* (m,n <= 5)".into())
}

fn maximization_lemma() -> Check {
    let r = check_lemma_grid(12, 3, 3, budget()).map_err(err)?;
    let summary = format!(
        "{} of {} instances match; first mismatch: {}",
        r.passed,
        r.samples,
        r.counterexample
            .as_ref()
            .map(|c| format!("{} {} expected {} got {}", c.input, c.stage, c.expected, c.got))
            .unwrap_or_default()
    );
    ensure(r.samples >= 8000, || format!("only {} instances", r.samples))?;
    if r.passed() {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn proposition_suite() -> Check {
    let f = f101();
    let mut total = 0;
    for g in [beta(&f), beta_inv(&f)] {
        for m in 1..=3 {
            for n in 0..=3 {
                let r = check_q_to_p(&g, params(m, n), 100, 6, budget()).map_err(err)?;
                ensure(r.passed(), || r.to_json_line())?;
                total += r.samples;
            }
        }
    }
    for level in Stratum::LEVELS {
        let alphas = stratum_examples(&f, level, 5, 6);
        ensure(alphas.len() >= 5, || format!("{level}: {} examples", alphas.len()))?;
        for a in &alphas {
            for m in 1..=2 {
                for n in 0..=2 {
                    let r = check_strata_proposition(level, a, params(m, n), 25, 6, budget()).map_err(err)?;
                    ensure(r.passed(), || r.to_json_line())?;
                    total += r.samples;
                }
            }
        }
    }
    fn conj<K: BaseField>(f: &K) -> Result<usize, String> {
        let mut tuples = 0;
        for level in [Stratum::A1A2, Stratum::A2A3, Stratum::A3A4] {
            for i in 0..20 {
                let mut rng = sample_rng(66, i);
                let a = random_in_stratum(f, level, &mut rng);
                let r = conjugation_formula_check(level, &a).map_err(err)?;
                ensure(r.passed(), || r.to_json_line())?;
                tuples += 1;
            }
        }
        Ok(tuples)
    }
    let tuples = conj(&Rationals)? + conj(&f)?;
    Ok(format!("{total} sampled checks, {tuples} conjugation tuples over q and fp=101"))
}

fn theorem_stepwise() -> Check {
    let f = f101();
    let mut count = 0;
    for level in Stratum::LEVELS {
        for a in stratum_examples(&f, level, 3, 7) {
            let r = check_theorem_stability(&a, params(1, 0), 5, 7, budget()).map_err(err)?;
            ensure(r.passed(), || r.to_json_line())?;
            count += 1;
        }
    }
    let chain = check_pi_beta_chain(&f, 4, budget()).map_err(err)?;
    ensure(chain.passed(), || chain.to_json_line())?;
    let trail = chain.details["trail"].as_array().cloned().unwrap_or_default();
    let last = trail.last().ok_or("empty chain")?;
    ensure(last["m"] == 64, || format!("final m = {}", last["m"]))?;
    Ok(format!("{count} alphas hop by hop; 4-hop chain reaches m = 64 with {} terms", last["terms"]))
}

fn certificates() -> Check {
    let f = f101();
    let id = AffineMap::identity(&f);
    let mut words = vec![
        (AlternatingWord::new(2, vec![id.clone(), id.clone()]).map_err(err)?, CertificateMode::Eager),
        (AlternatingWord::new(3, vec![id.clone(), id.clone()]).map_err(err)?, CertificateMode::Stepwise),
    ];
    for level in Stratum::LEVELS {
        for (i, a) in stratum_examples(&f, level, 2, 8).into_iter().enumerate() {
            let mut rng = sample_rng(8, 100 + i as u64);
            let outer = random_in_stratum(&f, Stratum::A0A1, &mut rng);
            let last = random_in_stratum(&f, Stratum::A0A1, &mut rng);
            words.push((
                AlternatingWord::new(3, vec![outer.clone(), last.clone()]).map_err(err)?,
                CertificateMode::Stepwise,
            ));
            words.push((AlternatingWord::new(3, vec![outer, a, last]).map_err(err)?, CertificateMode::Stepwise));
        }
    }
    let mut hops = 0;
    for (w, mode) in &words {
        let c = build_certificate(w, *mode, 8, budget()).map_err(|e| format!("{w}: {e}"))?;
        ensure(c.agreement_points == AGREEMENT_POINTS, || format!("{w}: {} agreement points", c.agreement_points))?;
        let last = c.hops.last().ok_or("certificate without hops")?;
        ensure(last.output == format!("P*{}", c.params), || format!("{w}: chain ends in {}", last.output))?;
        ensure(c.hops.windows(2).all(|h| h[0].output == h[1].input), || format!("{w}: hop chain is broken"))?;
        hops += c.hops.len();
        if *mode == CertificateMode::Eager {
            let witness = c.witness.as_ref().ok_or("eager certificate without witness")?;
            ensure(in_pstar_oracle(witness, c.params.m, c.params.n), || format!("witness not in P*{}", c.params))?;
            ensure(c.hops.iter().all(|h| matches!(h.evidence, HopEvidence::Witness { .. })), || {
                "sampled eager hop".into()
            })?;
            // The witness is the y-component of alpha phi alpha'.
            let raw = Word::atom(&f, Atom::Affine(c.alpha.clone()))
                .then(&w.to_word())
                .then(&Word::atom(&f, Atom::Affine(c.alpha_prime.clone())));
            for i in 0..20 {
                let x = random_point(&f, 9, i);
                ensure(witness.eval(&x) == raw.eval(&x)[1], || format!("witness disagrees at sample {i}"))?;
            }
        }
    }
    Ok(format!("{} certificates, {hops} hop records, no hop failures", words.len()))
}

fn centralizer() -> Check {
    fn order_of<K: BaseField>(f: &K) -> Result<u64, String> {
        let r = centralizer_report(f, 3, 50, 10).map_err(err)?;
        ensure(r.passed(), || r.to_json_line())?;
        r.details["order"].as_u64().ok_or_else(|| "no order in report".into())
    }
    // Brute force: the number of u in F_p with u^6 = 1.
    let sixth = |p: u64| (1..p).filter(|u| (0..6).fold(1, |acc, _| acc * u % p) == 1).count() as u64;
    let mut seen = Vec::new();
    for p in [7, 5, 2] {
        let got = order_of(&PrimeField::new(p).unwrap())?;
        ensure(got == sixth(p), || format!("|C| over fp={p} is {got}, expected {}", sixth(p)))?;
        seen.push(format!("fp={p}: {got}"));
    }
    let got = order_of(&Rationals)?;
    ensure(got == 2, || format!("|C| over q is {got}"))?;
    seen.push(format!("q: {got}"));
    ensure(sixth(7) == 6 && sixth(5) == 2 && sixth(2) == 1, || "oracle".into())?;
    Ok(seen.join(", "))
}

fn exclusion_example() -> Check {
    let q = Rationals;
    let (x, y, z) = (Polynomial::x(&q), Polynomial::y(&q), Polynomial::z(&q));
    let phi = Endomorphism::new([&x + &(&y * &y), y, z]);
    ensure(excluded_by_degree_bound(&phi), || format!("{phi} not excluded"))?;
    let f = f101();
    let mut samples = 0;
    for m in 1..=3 {
        for n in 0..=3 {
            for (s, density) in DENSITIES.iter().enumerate() {
                let mut rng = sample_rng(11, (m * 100 + n * 10) + s as u64);
                let p = random_star_element(&f, RegionKind::Pstar, params(m, n), *density, &mut rng, budget())
                    .map_err(err)?;
                ensure(in_pstar_oracle(&p, m, n), || format!("sample not in P*({m},{n})"))?;
                let d = p.total_degree().unwrap_or(0);
                ensure(d >= 6, || format!("P*({m},{n}) sample has total degree {d}"))?;
                samples += 1;
            }
        }
    }
    Ok(format!("(x+y^2, y, z) excluded; {samples} P* samples with total degree >= 6"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (1, "degree tables", Duration::from_secs(1), degree_tables),
        (2, "inverse identity", Duration::from_secs(1), inverse_identity),
        (3, "involutions", Duration::from_secs(5), involutions),
        (4, "region facts", Duration::from_secs(30), region_facts),
        (5, "maximization lemma", Duration::from_secs(60), maximization_lemma),
        (6, "proposition suite", Duration::from_secs(300), proposition_suite),
        (7, "stepwise theorem", Duration::from_secs(300), theorem_stepwise),
        (8, "certificates", Duration::from_secs(300), certificates),
        (9, "centralizer", Duration::from_secs(30), centralizer),
        (10, "exclusion example", Duration::from_secs(1), exclusion_example),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {limit:?}")),
            Err(d) => (false, d),
        };
        println!(
            "criterion {id:>2} {name}: {} ({:.2}s of {}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !ok {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
