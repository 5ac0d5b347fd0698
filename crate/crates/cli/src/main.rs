use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cotame::certify::{build_certificate, centralizer_report, normalize_word, CertificateMode};
use cotame::parse::{parse, parse_alternating, parse_polynomial, parse_word};
use cotame::region::{
    corners, enumerate_region, infer_star_params, poly_in_star, region_size, RegionKind, RegionParams,
};
use cotame::report::{Outcome, Status, VerificationReport};
use cotame::stability::{
    check_lemma_grid, check_q_to_p, check_strata_proposition, check_theorem_stability, is_beta_shaped, shape_table,
};
use cotame::strata::classify;
use cotame::suite::{run_suite, SuiteOptions, SUITES};
use cotame::{AffineMap, BaseField, Budget, DegreeFn, Error, FieldSpec, PrimeField, Rationals, Stratum};

#[derive(Parser, Debug)]
#[command(name = "cotame", version, about = "Exact polynomial automorphisms of affine 3-space")]
struct Cli {
    /// Coefficient field: `q` or `fp=P` for a prime P.
    #[arg(long, global = true, default_value = "q")]
    field: FieldSpec,

    /// Seed for every sampled check; required by sampling commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Maximum number of terms in any intermediate polynomial.
    #[arg(long, global = true, env = "COTAME_BUDGET", default_value_t = 5_000_000)]
    budget: usize,

    /// Add wall-clock times to reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    LemmaMax,
    BetaShaped,
    Qtop,
    Strata,
    Theorem,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and report its kind and canonical text.
    Parse { expr: String },
    /// Print an expression in canonical form.
    Print { expr: String },
    /// Compose maps and words left to right and expand the result.
    Compose {
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    /// Apply a map or word to a polynomial.
    Apply { map: String, poly: String },
    /// Weighted degree of a polynomial.
    Deg {
        /// Weights `a,b,c`, not all zero.
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 1, 1])]
        weights: Vec<u64>,
        poly: String,
    },
    /// Cyclic lexicographic degree of a polynomial.
    Ldeg {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        order: u8,
        poly: String,
    },
    /// Describe a lattice region, or test a polynomial against its starred set.
    Region {
        #[arg(long, default_value = "P")]
        kind: RegionKind,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = 0)]
        n: u64,
        /// List every lattice point.
        #[arg(long)]
        points: bool,
        /// Check membership of this polynomial and infer its parameters.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Run one verification check and print its report.
    Verify {
        #[arg(long)]
        check: Check,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = 0)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// `beta`-shaped map for `qtop` and `beta-shaped`.
        #[arg(long, default_value = "beta")]
        gamma: String,
        /// Affine map for `strata` and `theorem`.
        #[arg(long, default_value = "(y, x, z)")]
        alpha: String,
        /// Stratum for `strata`; defaults to the stratum of `--alpha`.
        #[arg(long)]
        level: Option<Stratum>,
        /// Largest coefficient for `lemma-max`.
        #[arg(long, default_value_t = 12)]
        max_coeff: u64,
    },
    /// Build a non-affineness certificate for `a0 ; theta ; a1 ; ... ; theta ; ar`.
    Certify {
        word: String,
        #[arg(long = "N", default_value_t = 3)]
        theta: usize,
        #[arg(long, default_value = "stepwise")]
        mode: CertificateMode,
    },
    /// Centralizer of theta_N in the affine group.
    Centralizer {
        #[arg(long = "N", default_value_t = 3)]
        theta: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Run a named batch of checks.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        name: String,
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long = "N", default_value_t = 3)]
        theta: usize,
    },
}

/// Result of a command: plain text lines, or reports.
enum Output {
    Text(Vec<String>),
    Reports(Vec<VerificationReport>),
}

macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            FieldSpec::Rationals => {
                let $f = &Rationals;
                $body
            }
            FieldSpec::Prime(p) => {
                let $f = &PrimeField::new(p)?;
                $body
            }
        }
    };
}

fn require_seed(seed: Option<u64>) -> Result<u64, Error> {
    seed.ok_or_else(|| Error::InvalidParameter("this command samples; pass --seed".into()))
}

fn parse_affine<K: BaseField>(field: &K, text: &str) -> Result<AffineMap<K>, Error> {
    let m = parse(field, text)?.into_map()?;
    AffineMap::from_endomorphism(&m)
}

fn run<K: BaseField>(field: &K, cli: &Cli) -> Result<Output, Error> {
    let budget = Budget::terms(cli.budget);
    let text = |lines: Vec<String>| Ok(Output::Text(lines));
    match &cli.command {
        Command::Parse { expr } => {
            let e = parse(field, expr)?;
            text(vec![json!({ "kind": e.kind(), "text": e.to_string(), "field": field.spec() }).to_string()])
        }
        Command::Print { expr } => text(vec![parse(field, expr)?.to_string()]),
        Command::Compose { exprs } => {
            let mut word = parse_word(field, &exprs[0])?;
            for e in &exprs[1..] {
                word = word.then(&parse_word(field, e)?);
            }
            text(vec![word.to_endomorphism(budget)?.to_string()])
        }
        Command::Apply { map, poly } => {
            let w = parse_word(field, map)?;
            let p = parse_polynomial(field, poly)?;
            text(vec![w.apply(&p, budget)?.to_string()])
        }
        Command::Deg { weights, poly } => {
            let w: [u64; 3] = weights
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidParameter("expected three weights `a,b,c`".into()))?;
            if w == [0, 0, 0] {
                return Err(Error::InvalidParameter("weights must not all vanish".into()));
            }
            let p = parse_polynomial(field, poly)?;
            text(vec![DegreeFn::weighted(w).eval(&p).to_string()])
        }
        Command::Ldeg { order, poly } => {
            let p = parse_polynomial(field, poly)?;
            text(vec![DegreeFn::lex(*order as usize).eval(&p).to_string()])
        }
        Command::Region { kind, m, n, points, poly } => {
            let params = RegionParams::new(*m, *n)?;
            let mut out = json!({
                "kind": kind,
                "params": params,
                "size": region_size(*kind, params),
                "corners": corners(*kind, params)?,
            });
            if *points {
                out["points"] = json!(*enumerate_region(*kind, params, budget)?);
            }
            if let Some(poly) = poly {
                let p = parse_polynomial(field, poly)?;
                out["member"] = json!(poly_in_star(&p, kind.starred(), params));
                out["inferred"] = json!(infer_star_params(&p, kind.starred()));
            }
            text(vec![out.to_string()])
        }
        Command::Verify { check, m, n, samples, gamma, alpha, level, max_coeff } => {
            let params = RegionParams::new(*m, *n)?;
            let report = match check {
                Check::LemmaMax => check_lemma_grid(*max_coeff, *m, *n, budget)?,
                Check::BetaShaped => {
                    let g = parse(field, gamma)?.into_map()?;
                    let mut r =
                        VerificationReport::new("beta-shaped", field.spec(), None, json!({ "gamma": g.to_string() }));
                    r.record(Outcome::Pass);
                    let table: Vec<Vec<String>> =
                        shape_table(&g).iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
                    r.details = json!({ "beta_shaped": is_beta_shaped(&g), "table": table });
                    r
                }
                Check::Qtop => {
                    let g = parse(field, gamma)?.into_map()?;
                    check_q_to_p(&g, params, *samples, require_seed(cli.seed)?, budget)?
                }
                Check::Strata => {
                    let a = parse_affine(field, alpha)?;
                    let level = level.unwrap_or_else(|| classify(&a).stratum);
                    check_strata_proposition(level, &a, params, *samples, require_seed(cli.seed)?, budget)?
                }
                Check::Theorem => {
                    let a = parse_affine(field, alpha)?;
                    check_theorem_stability(&a, params, *samples, require_seed(cli.seed)?, budget)?
                }
            };
            Ok(Output::Reports(vec![report]))
        }
        Command::Certify { word, theta, mode } => {
            let seed = require_seed(cli.seed)?;
            let w = parse_alternating(field, word, *theta)?;
            let normal = normalize_word(&w);
            let mut r = VerificationReport::new(
                "certificate",
                field.spec(),
                Some(seed),
                json!({ "word": w.to_string(), "normalized": normal.to_string(), "N": theta, "mode": mode }),
            );
            if *theta < 3 {
                r.note("N < 3: exploratory, stability is only claimed for N >= 3");
            }
            match build_certificate(&normal, *mode, seed, budget) {
                Ok(c) => {
                    r.record(Outcome::Pass);
                    r.details = c.to_json();
                }
                Err(e) => r.record(Outcome::from_error(e, normal.to_string(), "certificate")),
            }
            Ok(Output::Reports(vec![r]))
        }
        Command::Centralizer { theta, trials } => {
            Ok(Output::Reports(vec![centralizer_report(field, *theta, *trials, require_seed(cli.seed)?)?]))
        }
        Command::Suite { name, m, n, samples, theta } => {
            let opts =
                SuiteOptions { m: *m, n: *n, samples: *samples, seed: require_seed(cli.seed)?, budget, theta: *theta };
            Ok(Output::Reports(run_suite(field, name, &opts)?))
        }
    }
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for budget aborts, so usage errors exit with 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let result = (|| with_field!(cli.field, |f| run(f, &cli)))();
    match result {
        Ok(Output::Text(lines)) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Ok(Output::Reports(mut reports)) => {
            let elapsed = start.elapsed().as_millis() as u64;
            let mut code = 0u8;
            for r in &mut reports {
                if cli.timings {
                    r.wall_time_ms = Some(elapsed);
                }
                println!("{}", r.to_json_line());
                code = match (code, r.status) {
                    (1, _) | (_, Status::Fail) => 1,
                    (_, Status::Budget) => 2,
                    (c, Status::Pass) => c,
                };
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 2 } else { 1 })
        }
    }
}
