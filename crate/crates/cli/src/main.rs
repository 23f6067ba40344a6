mod expr;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use normal_order::boson::{coherent_overlap, BosonError};
use normal_order::combinat::{self, stirling2, CombinatError, NamedSequence, SequenceRecord};
use normal_order::flow::{self, FlowError, QvSymbol};
use normal_order::fps::FpsError;
use normal_order::rational::{self, int, ratio, ParseRationalError};
use normal_order::sheffer::{self, Family, ShefferError};
use normal_order::{NormalForm, Rational, Series, ShefferPair, Side};

use expr::{parse_expr, Expr, LoweringError, ParseError};

const ENV_DEFAULT_ORDER: &str = "NORMAL_ORDER_DEFAULT_ORDER";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Lowering(#[from] LoweringError),
    #[error("{0}")]
    Rational(#[from] ParseRationalError),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Parse(_) => "parse",
            CliError::Lowering(_) => "lowering",
            CliError::Rational(_) => "parse",
            CliError::Domain(_) => "domain",
        }
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        })*
    };
}
domain_from!(FpsError, FlowError, ShefferError, CombinatError, BosonError);

#[derive(Parser, Debug)]
#[command(name = "normal-order", version, about = "Exact normal ordering of boson operators q(a†)a + v(a†) and a†q(a) + v(a)")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// key = value file with defaults: order, lambda_order, fock_dim, tolerance, seed.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Creation,
    Annihilation,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Creation => Side::CreationLinear,
            SideArg::Annihilation => Side::AnnihilationLinear,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Katriel,
    FlowVsBruteforce,
    FockNumeric,
    Duality,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// T, G and the normally ordered λ-expansion of e^{λX}.
    NormalOrder {
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "0")]
        v: String,
        #[arg(long, value_enum, default_value = "creation")]
        side: SideArg,
        #[arg(long)]
        lambda_order: Option<usize>,
        /// x-order of the series for q and v.
        #[arg(long)]
        order: Option<usize>,
        /// Expansion center for q and v; the normal-form expansion needs 0.
        #[arg(long, default_value = "0")]
        center: String,
    },
    /// (q(a†)a + v(a†))^n by repeated normal-ordered products.
    Power {
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "0")]
        v: String,
        #[arg(long, value_enum, default_value = "creation")]
        side: SideArg,
        #[arg(long)]
        n: u32,
    },
    /// Sheffer polynomials with a monomiality report.
    Sheffer {
        #[arg(long, conflicts_with_all = ["a", "b"])]
        family: Option<String>,
        #[arg(long = "A", id = "a", requires = "b")]
        a: Option<String>,
        #[arg(long = "B", id = "b", requires = "a")]
        b: Option<String>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Terms of a named sequence or of n!·[λ^n] A(λ)e^{zB(λ)}.
    Sequence {
        #[arg(long, conflicts_with_all = ["a", "b", "z"])]
        name: Option<String>,
        /// Parameter of r_forests.
        #[arg(long)]
        r: Option<u32>,
        #[arg(long = "A", id = "a", requires = "b")]
        a: Option<String>,
        #[arg(long = "B", id = "b", requires = "a")]
        b: Option<String>,
        #[arg(long, default_value = "1")]
        z: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// q and v about x = z' from a Sheffer pair (A, B).
    Reverse {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long, default_value = "0")]
        zprime: String,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Runs an invariant suite; exit code 1 on any failure.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// ⟨z'|e^{λX}|z⟩ from the exact series and from a truncated Fock matrix.
    MatrixElement {
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "0")]
        v: String,
        #[arg(long, value_enum, default_value = "creation")]
        side: SideArg,
        #[arg(long)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        zprime: String,
        #[arg(long)]
        fock_dim: Option<usize>,
        #[arg(long)]
        lambda_order: Option<usize>,
    },
}

/// Defaults, in increasing precedence: built in, config file, environment.
#[derive(Debug, Clone)]
struct Settings {
    order: usize,
    lambda_order: usize,
    fock_dim: usize,
    tolerance: f64,
    seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { order: normal_order::fps::DEFAULT_ORDER, lambda_order: 6, fock_dim: 30, tolerance: 1e-8, seed: 1 }
    }
}

fn load_settings(config: Option<&PathBuf>) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        for (key, value) in &table {
            let int = || {
                value
                    .as_integer()
                    .and_then(|i| u64::try_from(i).ok())
                    .ok_or_else(|| CliError::Config(format!("{key} must be a non-negative integer")))
            };
            match key.as_str() {
                "order" => s.order = int()? as usize,
                "lambda_order" => s.lambda_order = int()? as usize,
                "fock_dim" => s.fock_dim = int()? as usize,
                "seed" => s.seed = int()?,
                "tolerance" => {
                    s.tolerance = value
                        .as_float()
                        .or_else(|| value.as_integer().map(|i| i as f64))
                        .ok_or_else(|| CliError::Config("tolerance must be a number".into()))?
                }
                other => return Err(CliError::Config(format!("unknown key `{other}`"))),
            }
        }
    }
    if let Ok(v) = std::env::var(ENV_DEFAULT_ORDER) {
        s.order = v.trim().parse().map_err(|_| CliError::Config(format!("{ENV_DEFAULT_ORDER} must be a non-negative integer, got `{v}`")))?;
    }
    Ok(s)
}

fn lower(text: &str, center: &Rational, order: usize) -> Result<Series, CliError> {
    Ok(parse_expr(text)?.lower(center, order)?)
}

/// Exact coefficients of a polynomial expression.
fn lower_polynomial(text: &str, what: &str) -> Result<Series, CliError> {
    let e: Expr = parse_expr(text)?;
    if !e.is_polynomial() {
        return Err(CliError::Domain(format!("{what} must be a polynomial for this command, got `{text}`")));
    }
    Ok(e.lower(&Rational::zero(), e.degree_bound())?)
}

fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("expected RE,IM, got `{text}`"));
    let mut parts = text.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

struct Output {
    text: String,
    success: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, success: true }
    }
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let settings = load_settings(cli.config.as_ref())?;
    let json = cli.json;
    match cli.command {
        Command::NormalOrder { q, v, side, lambda_order, order, center } => {
            let lambda_order = lambda_order.unwrap_or(settings.lambda_order);
            let order = order.unwrap_or(settings.order).max(lambda_order);
            let center = rational::parse_rational(&center)?;
            let sym = QvSymbol::new(lower(&q, &center, order)?, lower(&v, &center, order)?, center);
            let ne = flow::normal_exponential(&sym, side.into(), lambda_order)?;
            if json {
                return Ok(Output::ok(to_json(&ne)));
            }
            let var = ne.t.variable();
            let mut out = format!("T(λ, x) = {}\nG(λ, x) = {}\n", ne.t, ne.g);
            out += &format!("x-coefficients exact through {var}^{}\n", ne.reliable_degree());
            if !ne.expansion.is_empty() {
                out += "e^{λX} =\n";
                for (n, nf) in ne.expansion.iter().enumerate() {
                    out += &format!("  λ^{n}: {nf}\n");
                }
            }
            Ok(Output::ok(out))
        }
        Command::Power { q, v, side, n } => {
            let x = NormalForm::from_linear(&lower_polynomial(&q, "q")?, &lower_polynomial(&v, "v")?, side.into());
            let p = x.power(n);
            Ok(Output::ok(if json { to_json(&p) } else { format!("{p}\n") }))
        }
        Command::Sheffer { family, a, b, n_max } => {
            let order = n_max + 2;
            let (label, pair) = match (family, a, b) {
                (Some(name), _, _) => {
                    let fam: Family = name.parse()?;
                    (fam.name().to_string(), sheffer::catalog(fam, order))
                }
                (None, Some(a), Some(b)) => {
                    let zero = Rational::zero();
                    ("custom".to_string(), ShefferPair::from_ab(lower(&a, &zero, order)?, lower(&b, &zero, order)?)?)
                }
                _ => return Err(CliError::Usage("give --family NAME or both --A and --B".into())),
            };
            let polys = pair.sequence(n_max)?;
            let report = sheffer::monomiality_check(&pair, n_max)?;
            let success = report.passed();
            if json {
                let failures: Vec<_> = report
                    .failures
                    .iter()
                    .map(|f| json!({"identity": f.identity, "n": f.n, "expected": f.expected, "got": f.got}))
                    .collect();
                let value = json!({
                    "family": label,
                    "A": pair.a(), "B": pair.b(), "f": pair.f(), "g": pair.g(),
                    "polynomials": polys,
                    "monomiality": {"n_max": report.n_max, "checks": report.checks, "passed": success, "failures": failures},
                });
                return Ok(Output { text: to_json(&value), success });
            }
            let mut out = format!("family: {label}\nA(λ) = {}\nB(λ) = {}\n", pair.a().display_in("λ"), pair.b().display_in("λ"));
            for (n, p) in polys.iter().enumerate() {
                out += &format!("s_{n}(x) = {p}\n");
            }
            match report.first_failure() {
                None => out += &format!("monomiality: passed ({} checks, n <= {n_max})\n", report.checks),
                Some(f) => {
                    out += &format!(
                        "monomiality: FAILED {:?} at n = {}: expected {}, got {}\n",
                        f.identity, f.n, f.expected, f.got
                    )
                }
            }
            Ok(Output { text: out, success })
        }
        Command::Sequence { name, r, a, b, z, n_max } => {
            let record: SequenceRecord = match (name, a, b) {
                (Some(name), _, _) => combinat::named_sequence(NamedSequence::lookup(&name, r)?, n_max)?,
                (None, Some(a), Some(b)) => {
                    let zero = Rational::zero();
                    let z = rational::parse_rational(&z)?;
                    combinat::sequence_from_egf(&lower(&a, &zero, n_max)?, &lower(&b, &zero, n_max)?, &z, n_max)?
                }
                _ => return Err(CliError::Usage("give --name NAME or both --A and --B".into())),
            };
            if json {
                return Ok(Output::ok(to_json(&record)));
            }
            let mut out = format!("# {}: {}\n", record.name, record.provenance);
            for t in &record.terms {
                out += &format!("{t}\n");
            }
            Ok(Output::ok(out))
        }
        Command::Reverse { a, b, zprime, order } => {
            let order = order.unwrap_or(settings.order);
            let zero = Rational::zero();
            let zp = rational::parse_rational(&zprime)?;
            let sym = flow::qv_from_sheffer(&lower(&a, &zero, order + 1)?, &lower(&b, &zero, order + 1)?, &zp)?;
            if json {
                return Ok(Output::ok(to_json(&sym)));
            }
            let var = if zp.is_zero() { "x".to_string() } else { format!("(x - {zp})") };
            Ok(Output::ok(format!(
                "center: x = {zp}\nq(x) = {}\nv(x) = {}\n",
                sym.q.display_in(&var),
                sym.v.display_in(&var)
            )))
        }
        Command::Verify { suite, order, seed } => {
            let seed = seed.unwrap_or(settings.seed);
            let report = match suite {
                Suite::Katriel => verify_katriel(order.unwrap_or(10)),
                Suite::FlowVsBruteforce => verify_flow(order.unwrap_or(settings.lambda_order), seed)?,
                Suite::FockNumeric => verify_fock(&settings, seed)?,
                Suite::Duality => verify_duality(order.unwrap_or(10), seed)?,
            };
            let success = report.failures.is_empty();
            if json {
                return Ok(Output { text: to_json(&report), success });
            }
            let mut out = String::new();
            for line in &report.lines {
                out += line;
                out.push('\n');
            }
            out += &format!(
                "{}: {} checks, {} failed\n",
                report.suite,
                report.checks,
                report.failures.len()
            );
            Ok(Output { text: out, success })
        }
        Command::MatrixElement { q, v, side, lambda, z, zprime, fock_dim, lambda_order } => {
            let lambda_order = lambda_order.unwrap_or(16);
            let x_order = settings.order.max(3 * lambda_order);
            let zero = Rational::zero();
            let sym = QvSymbol::at_origin(lower(&q, &zero, x_order)?, lower(&v, &zero, x_order)?);
            let lambda_q = rational::parse_rational(&lambda)?;
            let lam = rational::to_f64(&lambda_q);
            let (z, zp) = (parse_complex(&z)?, parse_complex(&zprime)?);
            let side: Side = side.into();
            let overlap = coherent_overlap(zp, z);
            let series = flow::coherent_element(&sym, side, lam, zp, z, lambda_order)? * overlap;
            let dim = fock_dim.unwrap_or(settings.fock_dim);
            let op = if parse_expr(&q)?.is_polynomial() && parse_expr(&v)?.is_polynomial() {
                NormalForm::from_linear(&lower_polynomial(&q, "q")?, &lower_polynomial(&v, "v")?, side)
            } else {
                // Terms of creation degree >= dim have no matrix elements.
                let t = dim.min(x_order);
                NormalForm::from_linear(&sym.q.truncate(t), &sym.v.truncate(t), side)
            };
            let fock = op.to_fock(dim).exp(lam).coherent_expectation(zp, z)?;
            let diff = (series - fock).norm();
            let agree = diff <= settings.tolerance;
            if json {
                let value = json!({
                    "lambda": rational::to_pq(&lambda_q),
                    "z": [z.re, z.im], "zprime": [zp.re, zp.im],
                    "fock_dim": dim,
                    "series": [series.re, series.im],
                    "fock": [fock.re, fock.im],
                    "difference": diff,
                    "tolerance": settings.tolerance,
                    "agree": agree,
                });
                return Ok(Output::ok(to_json(&value)));
            }
            Ok(Output::ok(format!(
                "series: {:.11e} {:+.11e}i\nfock:   {:.11e} {:+.11e}i\n|difference|: {:.11e}\nagree within {:e}: {agree}\n",
                series.re, series.im, fock.re, fock.im, diff, settings.tolerance
            )))
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    suite: &'static str,
    seed: Option<u64>,
    checks: usize,
    failures: Vec<String>,
    #[serde(skip)]
    lines: Vec<String>,
}

impl VerifyReport {
    fn new(suite: &'static str, seed: Option<u64>) -> Self {
        VerifyReport { suite, seed, checks: 0, failures: Vec::new(), lines: Vec::new() }
    }

    fn record(&mut self, label: String, ok: bool) {
        self.checks += 1;
        self.lines.push(format!("{label}: {}", if ok { "ok" } else { "FAILED" }));
        if !ok {
            self.failures.push(label);
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize, range: i64, order: usize) -> Series {
    let c: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-range..=range)).collect();
    Series::from_ints(&c, order)
}

fn verify_katriel(n_max: usize) -> VerifyReport {
    let mut report = VerifyReport::new("katriel", None);
    for n in 1..=n_max as u32 {
        let got = NormalForm::number().power(n);
        let want = NormalForm::from_terms((1..=n).map(|k| (k, k, Rational::from_integer(stirling2(n as usize, k as usize)))));
        report.record(format!("(a†a)^{n}"), got == want);
    }
    report
}

fn verify_flow(lambda_order: usize, seed: u64) -> Result<VerifyReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::new("flow-vs-bruteforce", Some(seed));
    // λ^n coefficients have degree at most 1 + 3n in x.
    let order = 4 * lambda_order + 4;
    for _ in 0..10 {
        let sym = QvSymbol::at_origin(random_poly(&mut rng, 3, 3, order), random_poly(&mut rng, 3, 3, order));
        for side in [Side::CreationLinear, Side::AnnihilationLinear] {
            let ne = flow::normal_exponential(&sym, side, lambda_order)?;
            let brute = sym.operator(side)?.exp_series(lambda_order);
            report.record(format!("{} q = {} v = {}", side.name(), sym.q.display_terms("x"), sym.v.display_terms("x")), ne.expansion == brute);
        }
    }
    Ok(report)
}

fn verify_fock(settings: &Settings, seed: u64) -> Result<VerifyReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::new("fock-numeric", Some(seed));
    let order = 48;
    let mut cases = vec![
        ("bell".to_string(), Series::x(order), Series::x(order), 0.25, Complex64::new(0.6, 0.0), Complex64::new(0.6, 0.0)),
        ("hermite".to_string(), Series::from_ints(&[-1], order), Series::from_ints(&[0, 2], order), 0.25, Complex64::new(0.6, 0.0), Complex64::new(0.6, 0.0)),
    ];
    for k in 0..4 {
        let q = random_poly(&mut rng, 2, 1, order);
        let v = random_poly(&mut rng, 2, 1, order);
        let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let zp = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        cases.push((format!("random {k}"), q, v, 0.125, zp, z));
    }
    for (label, q, v, lambda, zp, z) in cases {
        let sym = QvSymbol::at_origin(q, v);
        for side in [Side::CreationLinear, Side::AnnihilationLinear] {
            let exact = flow::coherent_element(&sym, side, lambda, zp, z, 16)? * coherent_overlap(zp, z);
            let fock = sym.operator(side)?.to_fock(settings.fock_dim).exp(lambda).coherent_expectation(zp, z)?;
            let diff = (exact - fock).norm();
            report.record(format!("{label} {} |difference| = {diff:.3e}", side.name()), diff <= settings.tolerance);
        }
    }
    Ok(report)
}

fn verify_duality(order: usize, seed: u64) -> Result<VerifyReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::new("duality", Some(seed));
    for k in 0..10 {
        let mut a: Vec<Rational> = (0..=order + 1).map(|_| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
        let mut b: Vec<Rational> = (0..=order + 1).map(|_| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
        a[0] = Rational::one();
        b[0] = Rational::zero();
        if b[1].is_zero() {
            b[1] = int(1);
        }
        let (a, b) = (Series::new(a, order + 1), Series::new(b, order + 1));
        let zp = ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4));
        let sym = flow::qv_from_sheffer(&a, &b, &zp)?;
        let (a2, b2) = flow::sheffer_from_qv(&sym, &zp, order)?;
        report.record(format!("pair {k} at z' = {zp}"), a2 == a.truncate(order) && b2 == b.truncate(order));
    }
    Ok(report)
}

fn main() -> ExitCode {
    let json = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            report_error(&CliError::Usage(first), json);
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            report_error(&e, json);
            ExitCode::from(if matches!(e, CliError::Usage(_)) { 2 } else { 1 })
        }
    }
}

fn report_error(e: &CliError, json: bool) {
    let message = e.to_string().replace('\n', " ");
    if json {
        eprintln!("{}", json!({"error": {"kind": e.kind(), "message": message}}));
    } else {
        eprintln!("error: {}: {message}", e.kind());
    }
}
