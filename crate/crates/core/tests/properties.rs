//! Algebraic and structural invariants, checked on generated inputs.

use proptest::prelude::*;

use cotame::certify::{first_disagreement, normalize_word, AlternatingWord};
use cotame::parse::{parse, parse_polynomial, parse_word};
use cotame::region::{
    corners, cub_closure, enumerate_region, in_region, poly_in_star, random_star_element, RegionKind, RegionParams,
};
use cotame::report::sample_rng;
use cotame::strata::{a2_map, classify, random_in_stratum};
use cotame::{
    AffineMap, Atom, Budget, DegreeFn, DegreeValue, Endomorphism, Field, Monomial, Polynomial, PrimeField, Rationals,
    Stratum, Word,
};

fn f101() -> PrimeField {
    PrimeField::new(101).unwrap()
}

fn budget() -> Budget {
    Budget::terms(1_000_000)
}

fn poly_from<K: Field>(f: &K, terms: &[(u32, u32, u32, i64)]) -> Polynomial<K> {
    Polynomial::from_terms(f, terms.iter().map(|&(i, j, k, c)| (Monomial::new(i, j, k), f.from_i64(c))))
}

fn terms(max_exp: u32, len: usize) -> impl Strategy<Value = Vec<(u32, u32, u32, i64)>> {
    prop::collection::vec((0..=max_exp, 0..=max_exp, 0..=max_exp, -20i64..=20), 0..=len)
}

fn small_poly() -> impl Strategy<Value = Vec<(u32, u32, u32, i64)>> {
    terms(3, 5)
}

fn endo<K: Field>(f: &K, comps: &[Vec<(u32, u32, u32, i64)>; 3]) -> Endomorphism<K> {
    Endomorphism::new([poly_from(f, &comps[0]), poly_from(f, &comps[1]), poly_from(f, &comps[2])])
}

fn small_endo() -> impl Strategy<Value = [Vec<(u32, u32, u32, i64)>; 3]> {
    [terms(2, 3), terms(2, 3), terms(2, 3)]
}

fn degree_fn() -> impl Strategy<Value = DegreeFn> {
    prop_oneof![
        (0u64..5, 0u64..5, 0u64..5)
            .prop_filter("nonzero weight", |w| *w != (0, 0, 0))
            .prop_map(|(a, b, c)| { DegreeFn::weighted([a, b, c]) }),
        (1usize..=3).prop_map(DegreeFn::lex),
    ]
}

fn region_params() -> impl Strategy<Value = RegionParams> {
    (1u64..=4, 0u64..=4).prop_map(|(m, n)| RegionParams::new(m, n).unwrap())
}

fn stratum() -> impl Strategy<Value = Stratum> {
    prop::sample::select(vec![Stratum::A0A1, Stratum::A1A2, Stratum::A2A3, Stratum::A3A4, Stratum::A4])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
        let f = f101();
        let (p, r, t) = (poly_from(&f, &a), poly_from(&f, &b), poly_from(&f, &c));
        prop_assert_eq!(&p + &r, &r + &p);
        prop_assert_eq!(&p * &r, &r * &p);
        prop_assert_eq!(&(&p + &r) + &t, &p + &(&r + &t));
        prop_assert_eq!(&(&p * &r) * &t, &p * &(&r * &t));
        prop_assert_eq!(&p * &(&r + &t), &(&p * &r) + &(&p * &t));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Polynomial::one(&f), p.clone());
        prop_assert_eq!(&p + &(-&p), Polynomial::zero(&f));
        let q = Rationals;
        let (a, b, c) = (poly_from(&q, &a), poly_from(&q, &b), poly_from(&q, &c));
        prop_assert_eq!(&a * &(&b - &c), &(&a * &b) - &(&a * &c));
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), phi in small_endo()) {
        let f = f101();
        let (a, b, phi) = (poly_from(&f, &a), poly_from(&f, &b), endo(&f, &phi));
        let img = |p: &Polynomial<PrimeField>| phi.apply(p, budget()).unwrap();
        prop_assert_eq!(img(&(&a * &b)), &img(&a) * &img(&b));
        prop_assert_eq!(img(&(&a + &b)), &img(&a) + &img(&b));
        prop_assert!(img(&Polynomial::one(&f)).is_one());
    }

    #[test]
    fn pow_matches_repeated_multiplication(a in terms(2, 4), e in 0u32..6) {
        let f = f101();
        let a = poly_from(&f, &a);
        let naive = (0..e).fold(Polynomial::one(&f), |acc, _| &acc * &a);
        prop_assert_eq!(a.pow(e).unwrap(), naive);
    }

    #[test]
    fn degree_axioms(a in small_poly(), b in small_poly(), deg in degree_fn()) {
        let f = f101();
        let (a, b) = (poly_from(&f, &a), poly_from(&f, &b));
        prop_assert_eq!(deg.eval(&Polynomial::zero(&f)), DegreeValue::MinusInfinity);
        prop_assert_eq!(deg.eval(&(&a * &b)), deg.eval(&a).add(&deg.eval(&b)));
        prop_assert!(deg.eval(&(&a + &b)) <= deg.eval(&a).max(deg.eval(&b)));
    }

    #[test]
    fn composition_is_a_right_action(p in small_poly(), phi in small_endo(), psi in small_endo()) {
        let f = f101();
        let (p, phi, psi) = (poly_from(&f, &p), endo(&f, &phi), endo(&f, &psi));
        let both = phi.compose(&psi, budget()).unwrap();
        let stepwise = psi.apply(&phi.apply(&p, budget()).unwrap(), budget()).unwrap();
        prop_assert_eq!(both.apply(&p, budget()).unwrap(), stepwise.clone());
        let w = Word::new(&f, vec![Atom::Raw(phi.clone()), Atom::Raw(psi.clone())]);
        prop_assert_eq!(w.apply(&p, budget()).unwrap(), stepwise);
        let x = [f.from_i64(3), f.from_i64(-7), f.from_i64(11)];
        prop_assert_eq!(w.eval(&x), both.eval(&x));
    }

    #[test]
    fn strata_classify_and_reconstruct(s in stratum(), seed in any::<u64>()) {
        for f in [f101(), PrimeField::new(7).unwrap()] {
            let a = random_in_stratum(&f, s, &mut sample_rng(seed, 0));
            let label = classify(&a);
            prop_assert_eq!(label.stratum, s);
            if let Some(p) = label.params {
                prop_assert_eq!(a2_map(&f, &p).unwrap(), a);
            }
        }
    }

    #[test]
    fn corners_decide_star_membership(params in region_params(), seed in any::<u64>(), drop in 0usize..3) {
        let f = f101();
        let p = random_star_element(&f, RegionKind::Pstar, params, 0.3, &mut sample_rng(seed, 1), budget()).unwrap();
        prop_assert!(poly_in_star(&p, RegionKind::Pstar, params));
        let cs = corners(RegionKind::Pstar, params).unwrap();
        if drop < cs.len() {
            let without = Polynomial::from_terms(&f, p.terms().iter().filter(|t| t.0 != cs[drop]).cloned());
            prop_assert!(!poly_in_star(&without, RegionKind::Pstar, params));
        }
    }

    #[test]
    fn p_region_lies_in_q_of_four_m(params in region_params()) {
        let big = RegionParams::new(4 * params.m, params.n).unwrap();
        for v in enumerate_region(RegionKind::P, params, budget()).unwrap().iter() {
            prop_assert!(in_region(v, RegionKind::Q, big), "{} in P{} but not Q{}", v, params, big);
        }
    }

    #[test]
    fn regions_are_closed_under_cub(params in region_params(), kind in prop::sample::select(vec![RegionKind::P, RegionKind::Q])) {
        let points = enumerate_region(kind, params, budget()).unwrap();
        let closure = cub_closure(points.iter());
        prop_assert_eq!(closure.len(), points.len());
        prop_assert!(closure.iter().all(|v| in_region(v, kind, params)));
    }

    #[test]
    fn polynomials_round_trip(a in terms(4, 6), rational in any::<bool>()) {
        if rational {
            let q = Rationals;
            let p = poly_from(&q, &a);
            let scaled = p.scale(&q.from_ratio(&2.into(), &7.into()).unwrap());
            for p in [p, scaled] {
                prop_assert_eq!(parse_polynomial(&q, &p.to_string()).unwrap(), p);
            }
        } else {
            let f = f101();
            let p = poly_from(&f, &a);
            prop_assert_eq!(parse_polynomial(&f, &p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn words_round_trip(seed in any::<u64>(), picks in prop::collection::vec(0u8..5, 0..6)) {
        let f = f101();
        let mut rng = sample_rng(seed, 2);
        let atoms: Vec<Atom<PrimeField>> = picks
            .iter()
            .map(|p| match p {
                0 => Atom::Pi,
                1 => Atom::Beta,
                2 => Atom::BetaInv,
                3 => Atom::Affine(AffineMap::random(&f, &mut rng)),
                _ => Atom::Raw(Endomorphism::new([
                    Polynomial::x(&f),
                    &Polynomial::y(&f) + &Polynomial::z(&f).pow(2).unwrap(),
                    Polynomial::z(&f),
                ])),
            })
            .collect();
        let w = Word::new(&f, atoms);
        if !w.is_empty() {
            let back = parse_word(&f, &w.to_string()).unwrap();
            prop_assert_eq!(back.to_string(), w.to_string());
            prop_assert_eq!(parse(&f, &back.to_string()).unwrap().to_string(), w.to_string());
        }
    }

    #[test]
    fn normalization_preserves_the_map(seed in any::<u64>(), layout in prop::collection::vec(any::<bool>(), 1..4)) {
        let f = PrimeField::new(7).unwrap();
        let mut rng = sample_rng(seed, 3);
        let mut affines = vec![random_in_stratum(&f, Stratum::A0A1, &mut rng)];
        for in_a4 in &layout {
            let s = if *in_a4 { Stratum::A4 } else { Stratum::A1A2 };
            affines.push(random_in_stratum(&f, s, &mut rng));
        }
        affines.push(random_in_stratum(&f, Stratum::A0A1, &mut rng));
        let w = AlternatingWord::new(3, affines).unwrap();
        let nw = normalize_word(&w);
        prop_assert!(nw.is_normal());
        prop_assert_eq!(first_disagreement(&w.to_word(), &nw.to_word(), 30, seed).unwrap(), None);
    }

    #[test]
    fn starred_samples_have_total_degree_at_least_six(params in region_params(), seed in any::<u64>(), density in prop::sample::select(vec![0.0, 0.2, 1.0])) {
        let f = f101();
        let p = random_star_element(&f, RegionKind::Pstar, params, density, &mut sample_rng(seed, 4), budget()).unwrap();
        let d = p.total_degree().unwrap();
        prop_assert!(d >= 6 * params.m + params.n && d >= 6);
    }
}

#[test]
fn printed_expressions_round_trip() {
    let q = Rationals;
    let corpus = [
        "(x+y^2*(y+z^2)^2, y+z^2, z)",
        "(x-y^2*(y-z^2)^2, y-z^2, z)",
        "(y, x, z)",
        "(x+y^2, y, z)",
        "(256*x + 3*y + 5*z + 7, 4*y, 2*z)",
        "(256*x + 5*z - 1/2, 4*y, 2*z)",
        "pi ; beta",
        "theta(3)",
        "pi ; beta_inv ; (x, y, z + 1) ; beta",
    ];
    for text in corpus {
        let first = parse(&q, text).unwrap();
        let again = parse(&q, &first.to_string()).unwrap();
        assert_eq!(again.to_string(), first.to_string(), "{text}");
        assert_eq!(again.kind(), first.kind(), "{text}");
    }
    assert_eq!(parse_word(&q, "theta(3)").unwrap().len(), 13);
    let beta = cotame::word::beta(&q);
    assert_eq!(parse(&q, corpus[0]).unwrap().into_map().unwrap(), beta);
}
