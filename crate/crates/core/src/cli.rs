//! Command-line frontend.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::congruence::{congruence_solve, constant_term, obstruction_check, stabilization_rank, Obstruction, Stabilization};
use crate::corpus::{equal_word_pair, random_even_lattice};
use crate::eisenstein::{min_samples, Method};
use crate::error::{Error, Result};
use crate::fourier::{
    df_to_json, ensure_same_df, read_json, to_json_string, BasisJson, BasisTable, DfJson, FloatTableJson, PrincipalPart,
    PrincipalPartJson, RationalTable, TableJson,
};
use crate::lattice::{discriminant_form, gauss_sum, milgram_check, validate_lattice, DiscriminantForm, Lattice};
use crate::metaplectic::{Generator, Word};
use crate::rationalize::{reconstruct_eisenstein, CosetBound};
use crate::weil::WeilRepresentation;

#[derive(Parser, Debug)]
#[command(name = "vvforms", version, about = "Weil representations, vector-valued Eisenstein series and their congruences")]
pub struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = "VVFORMS_THREADS")]
    pub threads: Option<usize>,

    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Progress messages on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signature, discriminant form, Gauss sum and Milgram check of a lattice.
    LatticeInfo {
        #[arg(long)]
        gram: PathBuf,
    },
    /// Exact ρ (or ρ*) of a word in S and T, e.g. "S T^2 S^-1".
    WeilMatrix {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        dual: bool,
    },
    /// Fourier coefficients of the Eisenstein series up to N, as exact rationals.
    Eisenstein(EisensteinArgs),
    /// Checks whether a principal part is the principal part of a weakly holomorphic form.
    Obstruct {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        ppart: PathBuf,
        #[arg(long)]
        cusps: PathBuf,
        /// Eisenstein table; when given, the constant term is reported too.
        #[arg(long = "E")]
        eisenstein: Option<PathBuf>,
    },
    /// Finds a cusp form congruent to d·E modulo d up to N.
    Congruence {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long = "E")]
        eisenstein: PathBuf,
        #[arg(long)]
        d: BigInt,
        #[arg(long)]
        cusps: PathBuf,
        #[arg(long = "N")]
        n: u64,
    },
    /// Runs a quick end-to-end check of the library.
    Selftest {
        /// Relative residual accepted in the transformation-law check.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

#[derive(Args, Debug)]
pub struct EisensteinArgs {
    #[arg(long)]
    pub gram: PathBuf,
    #[arg(long = "N")]
    pub n: u64,
    /// Coset bound: an integer or "auto".
    #[arg(long = "C", default_value = "auto")]
    pub c: String,
    #[arg(long, default_value_t = 100_000)]
    pub max_den: u64,
    /// Weight as a rational such as 5/2; defaults to 1 + l/2 for signature (2, l).
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    pub method: MethodArg,
    /// Sample count for --method sample; defaults to the minimum 8·(N + level).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sampling height for --method sample.
    #[arg(long, default_value_t = 1.0)]
    pub y: f64,
    /// Emit the floating-point table with error estimates and skip rationalization.
    #[arg(long)]
    pub float: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Sample,
}

/// A Gram matrix file: either a bare array of rows or {"gram": rows}.
#[derive(Deserialize)]
#[serde(untagged)]
enum GramFile {
    Bare(Vec<Vec<i64>>),
    Wrapped { gram: Vec<Vec<i64>> },
}

pub fn read_lattice(path: &Path) -> Result<Lattice> {
    let g = match read_json::<GramFile>(path)? {
        GramFile::Bare(g) | GramFile::Wrapped { gram: g } => g,
    };
    validate_lattice(&g)
}

/// Raised for bad flag values; mapped to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

pub fn parse_word(s: &str) -> anyhow::Result<Word> {
    let mut w = Word::new();
    for tok in s.split_whitespace() {
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().map_err(|_| usage(format!("bad exponent in {tok:?}")))?),
            None => (tok, 1),
        };
        let g = match name {
            "S" => Generator::S,
            "T" => Generator::T,
            _ => return Err(usage(format!("unknown generator {name:?}; use S or T"))),
        };
        w.push(g, exp);
    }
    Ok(w)
}

fn format_complex(z: Complex64) -> String {
    let clean = |x: f64| {
        let r = (x * 1e12).round() / 1e12;
        if r == 0.0 { 0.0 } else { r }
    };
    let (re, im) = (clean(z.re), clean(z.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re}"),
        (true, false) => format!("{im}i"),
        (false, false) if im < 0.0 => format!("{re} - {}i", -im),
        _ => format!("{re} + {im}i"),
    }
}

#[derive(Serialize)]
struct LatticeInfo {
    rank: usize,
    signature: (usize, usize),
    det: String,
    discriminant_form: DfJson,
    size: u64,
    level: u64,
    gauss_sum: String,
    gauss_sum_complex: String,
    milgram: bool,
    weight: Option<String>,
}

fn lattice_info(lat: &Lattice) -> LatticeInfo {
    let df = discriminant_form(lat);
    let g = gauss_sum(&df);
    LatticeInfo {
        rank: lat.rank(),
        signature: lat.signature(),
        det: lat.det().to_string(),
        discriminant_form: df_to_json(&df),
        size: df.size(),
        level: df.level(),
        gauss_sum: g.to_string(),
        gauss_sum_complex: format_complex(g.embed()),
        milgram: milgram_check(lat),
        weight: lat.l().map(|l| Rational64::new(2 + l as i64, 2).to_string()),
    }
}

/// An element of Q(ζ_M) in the power basis 1, ζ_M, …, ζ_M^{φ(M)−1}.
#[derive(Serialize)]
struct CycloJson {
    #[serde(rename = "M")]
    m: u64,
    coeffs: Vec<String>,
}

#[derive(Serialize)]
struct WeilMatrixOut {
    word: String,
    dual: bool,
    dim: usize,
    rows: Vec<Vec<CycloJson>>,
    float: Vec<Vec<String>>,
}

fn weight_for(lat: &Lattice, weight: Option<&str>) -> anyhow::Result<Rational64> {
    match weight {
        Some(w) => w.parse::<Rational64>().map_err(|_| usage(format!("cannot parse weight {w:?}"))),
        None => match lat.l() {
            Some(l) => Ok(Rational64::new(2 + l as i64, 2)),
            None => {
                let (p, q) = lat.signature();
                Err(Error::Precondition(format!(
                    "lattice has signature ({p}, {q}), not (2, l) with l ≥ 3; pass --weight"
                ))
                .into())
            }
        },
    }
}

#[derive(Serialize)]
struct EisensteinOut {
    #[serde(flatten)]
    table: TableJson,
    d: String,
    #[serde(rename = "C")]
    c: u64,
}

fn eisenstein(args: &EisensteinArgs, verbose: bool) -> anyhow::Result<String> {
    let lat = read_lattice(&args.gram)?;
    let df = discriminant_form(&lat);
    let k = weight_for(&lat, args.weight.as_deref())?;
    if args.max_den == 0 {
        return Err(usage("--max-den must be positive"));
    }
    let bound = if args.c == "auto" {
        CosetBound::Auto { cap: 4096 }
    } else {
        match args.c.parse::<u64>() {
            Ok(c) if c >= 4 => CosetBound::Fixed(c),
            _ => return Err(usage(format!("--C must be \"auto\" or an integer ≥ 4, got {:?}", args.c))),
        }
    };
    let method = match args.method {
        MethodArg::Direct => Method::Direct,
        MethodArg::Sample => {
            if !(args.y > 0.0) {
                return Err(usage("--y must be positive"));
            }
            Method::Sample { samples: args.samples.unwrap_or_else(|| min_samples(&df, args.n)), y: args.y }
        }
    };
    if args.float {
        let c = match bound {
            CosetBound::Fixed(c) => c,
            CosetBound::Auto { .. } => 1000,
        };
        let t = crate::eisenstein::numeric_coefficients(&df, k, args.n, c, method)?;
        let j: FloatTableJson = t.to_json();
        return Ok(to_json_string(&j));
    }
    let r = reconstruct_eisenstein(&df, k, args.n, bound, method, args.max_den)?;
    if verbose {
        let worst = r.float.coeffs.values().map(|c| c.err).fold(0.0, f64::max);
        eprintln!("C = {}, d = {}, largest error estimate {worst:.2e}", r.c_max, r.d);
    }
    Ok(to_json_string(&EisensteinOut { table: r.exact.to_json(), d: r.d.to_string(), c: r.c_max }))
}

fn load_cusps(path: &Path, df: &DiscriminantForm) -> Result<BasisTable> {
    let b = BasisTable::from_json(&read_json::<BasisJson>(path)?)?;
    ensure_same_df(df, &b.df, "cusp basis")?;
    Ok(b)
}

fn load_table(path: &Path, df: &DiscriminantForm) -> Result<RationalTable> {
    let t = RationalTable::from_json(&read_json::<TableJson>(path)?)?;
    ensure_same_df(df, &t.df, "Eisenstein table")?;
    Ok(t)
}

#[derive(Serialize)]
struct ObstructOut {
    #[serde(flatten)]
    result: Obstruction,
    constant_term: Option<String>,
}

#[derive(Serialize)]
struct CongruenceOut {
    #[serde(flatten)]
    solution: crate::congruence::CongruenceSolutionJson,
    stabilization: Stabilization,
}

fn selftest(tolerance: f64) -> anyhow::Result<String> {
    let mut report = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20240101);
    for i in 0..40 {
        let lat = random_even_lattice(&mut rng, 6, 2000);
        anyhow::ensure!(milgram_check(&lat), "Milgram formula fails for {:?}", lat.gram());
        if i == 39 {
            report.push("milgram: 40 random lattices".to_string());
        }
    }
    let example = validate_lattice(&crate::fixtures::example_gram())?;
    let rep = WeilRepresentation::new(&discriminant_form(&example));
    for _ in 0..10 {
        let (a, b) = equal_word_pair(&mut rng, 5);
        anyhow::ensure!(rep.rho_word(&a) == rep.rho_word(&b), "ρ({a}) ≠ ρ({b})");
    }
    anyhow::ensure!(rep.rho_s().is_unitary(), "ρ(S) is not unitary");
    report.push("weil: 10 equal word pairs, unitarity".to_string());

    let triv = DiscriminantForm::trivial();
    let k = Rational64::from_integer(12);
    let r = reconstruct_eisenstein(&triv, k, 3, CosetBound::Fixed(64), Method::Direct, 10_000)?;
    let ratio = r.exact.coeff(0, Rational64::one()) / r.exact.coeff(0, Rational64::zero());
    anyhow::ensure!(ratio == BigRational::new(65520.into(), 691.into()), "c(E,0,1)/c(E,0,0) = {ratio}");
    let wf1 = WeilRepresentation::new(&triv).to_float();
    let g = crate::metaplectic::MetaplecticElement::new([1, -1, 1, 0], 1);
    // Im τ = 1.2 and Im gτ ≈ 0.78 make the truncation at n = 12 invisible.
    let tau = Complex64::new(0.3, 1.2);
    let series = crate::eisenstein::EisensteinSeries::compute(&triv, k, 64, Rational64::from_integer(12))?;
    let res = crate::eisenstein::transformation_residual(&wf1, k, &g, tau, &|z| series.eval(z), true);
    anyhow::ensure!(res < tolerance, "transformation residual {res:e}");
    report.push(format!("eisenstein: 65520/691 recovered, residual {res:.1e}"));

    let cusps = crate::fixtures::delta_basis(10);
    let p = PrincipalPart::with_terms(triv.clone(), &[(0, Rational64::from_integer(-2), 1), (0, Rational64::from_integer(-1), 24)])?;
    anyhow::ensure!(obstruction_check(&p, &cusps)?.admissible, "q⁻² + 24q⁻¹ rejected");
    let c0 = constant_term(&p, &r.exact)?;
    anyhow::ensure!(c0 == BigRational::from_integer((-196560).into()), "constant term {c0}");
    let sol = congruence_solve(&r.exact, &BigInt::from(691), &cusps, 3)?;
    anyhow::ensure!(sol.combo == vec![BigInt::from(65520 % 691)], "combination {:?}", sol.combo);
    report.push("congruence: 65520·Δ mod 691, constant term −196560".to_string());
    Ok(report.join("\n") + "\nselftest passed\n")
}

/// Runs the command and returns its output text.
pub fn execute(cli: &Cli) -> anyhow::Result<String> {
    match &cli.command {
        Command::LatticeInfo { gram } => Ok(to_json_string(&lattice_info(&read_lattice(gram)?))),
        Command::WeilMatrix { gram, word, dual } => {
            let df = discriminant_form(&read_lattice(gram)?);
            let w = parse_word(word)?;
            let rep = WeilRepresentation::new(&df);
            let mut m = rep.rho_word(&w);
            if *dual {
                m = m.conj();
            }
            let n = m.dim();
            let rows = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let e = m.entry(i, j);
                            CycloJson { m: e.modulus(), coeffs: e.coeffs().iter().map(|c| c.to_string()).collect() }
                        })
                        .collect()
                })
                .collect();
            let float = (0..n).map(|i| (0..n).map(|j| format_complex(m.entry(i, j).embed())).collect()).collect();
            Ok(to_json_string(&WeilMatrixOut { word: w.to_string(), dual: *dual, dim: n, rows, float }))
        }
        Command::Eisenstein(args) => eisenstein(args, cli.verbose),
        Command::Obstruct { gram, ppart, cusps, eisenstein } => {
            let df = discriminant_form(&read_lattice(gram)?);
            let p = PrincipalPart::from_json(&read_json::<PrincipalPartJson>(ppart)?, Some(&df))?;
            let basis = load_cusps(cusps, &df)?;
            let result = obstruction_check(&p, &basis)?;
            let constant = match eisenstein {
                Some(path) if result.admissible => Some(constant_term(&p, &load_table(path, &df)?)?.to_string()),
                _ => None,
            };
            Ok(to_json_string(&ObstructOut { result, constant_term: constant }))
        }
        Command::Congruence { gram, eisenstein, d, cusps, n } => {
            let df = discriminant_form(&read_lattice(gram)?);
            let e = load_table(eisenstein, &df)?;
            let basis = load_cusps(cusps, &df)?;
            let stab = stabilization_rank(&basis, *n)?;
            if !stab.stable {
                return Err(Error::Precondition(format!(
                    "N = {n} does not determine the cusp basis: coefficient rank {} < dimension {}",
                    stab.rank, stab.dim
                ))
                .into());
            }
            let sol = congruence_solve(&e, d, &basis, *n)?;
            Ok(to_json_string(&CongruenceOut { solution: sol.to_json(), stabilization: stab }))
        }
        Command::Selftest { tolerance } => {
            if !(*tolerance > 0.0 && *tolerance < 1e-2) {
                return Err(usage("--tolerance must lie in (0, 0.01)"));
            }
            selftest(*tolerance)
        }
    }
}

/// Parses argv, runs, writes output, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return 2;
        }
        // Fails only if a pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::Error::new(Error::Format(format!("cannot write {}: {e}", path.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() { 2 } else { 1 }
        }
    }
}
