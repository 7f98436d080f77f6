mod json;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pso_core::classify;
use pso_core::exact::{GaussianRational, Poly, Rational, Var};
use pso_core::fourier::{act_on_cf, psi, psi_inverse, CfFamily};
use pso_core::hermite::hermite;
use pso_core::ore::{
    intersection_operator, lclm_weyl, mixture_annihilator, mixture_stein_operator, semicircle_annihilator, MixtureSpec,
};
use pso_core::pso::{self, basis_decompose, divide_by_g, is_member, make_operator, Family, MemberBounds};
use pso_core::syntax::{parse, parse_poly, parse_x, ParseError};
use pso_core::verify::{self, exact_expectation, parse_rational, suite_table, DistributionSpec, SuiteRow};
use pso_core::WeylElement;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pso", version, about = "Polynomial Stein operators of the standard Gaussian")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    X,
    T,
}

impl From<Mode> for Var {
    fn from(m: Mode) -> Var {
        match m {
            Mode::X => Var::X,
            Mode::T => Var::T,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Membership in PSO(N), with residual and cofactor.
    Check {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Decomposition of a member in the basis H_k D^t - H_{k+t}.
    Basis {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// S = (D - x) Q + r.
    Factor {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// The Hermite polynomial H_n.
    Hermite { n: usize },
    /// Product in the Weyl algebra.
    Mul {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        #[arg(long, value_enum, default_value = "x")]
        mode: Mode,
    },
    /// Fourier image of an x-operator, or the inverse image of a t-operator.
    Fourier {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Apply a t-operator to exp(i mu t - sigma2 t^2 / 2).
    Annihilates {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// `sigma2=<q>,mu=<q>`.
        #[arg(long, default_value = "sigma2=1,mu=0")]
        cf: String,
    },
    /// A named operator: generator, s, l, basis, xpow, first-order, rodriguez.
    Family {
        name: String,
        /// Comma-separated `key=value` pairs, e.g. `m=3` or `k=1,t=2` or `p=x^2+1`.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
    },
    /// Least common left multiple of two t-operators.
    Lclm {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
    /// Stein operator of a centred Gaussian mixture.
    Mixture {
        /// Comma-separated variances.
        #[arg(long)]
        sigma2: String,
        /// Comma-separated weights; equal weights by default.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// A nonzero operator in PSO(N) and in the Stein class of another law.
    Intersect {
        #[arg(long = "with", value_enum)]
        with: Other,
        #[arg(long, default_value = "1")]
        radius: String,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Boundedness classification of the order-m annihilators.
    Classify {
        #[arg(long, conflicts_with = "upto", required_unless_present = "upto")]
        m: Option<usize>,
        #[arg(long)]
        upto: Option<usize>,
    },
    /// E[S f(X)] over the fixed test suite.
    Verify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value = "gaussian(mu=0,sigma2=1)")]
        dist: String,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// A pseudo-random operator, deterministic in the seed.
    Random {
        #[arg(long)]
        seed: u64,
        /// Draw a member of PSO(N).
        #[arg(long)]
        member: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Other {
    Semicircle,
}

enum CliError {
    Parse(ParseError),
    Engine(pso_core::Error),
    Usage(String),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<pso_core::Error> for CliError {
    fn from(e: pso_core::Error) -> Self {
        CliError::Engine(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use pso_core::Error as E;
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 1,
            CliError::Engine(
                E::InvalidParameter(_) | E::VarMismatch { .. } | E::WrongVariable { .. } | E::DuplicateVariance(_),
            ) => 1,
            CliError::Engine(_) => 2,
        }
    }

    fn report(&self) -> Value {
        match self {
            CliError::Parse(e) => json!({"error": "parse", "line": e.line, "column": e.column, "message": e.to_string()}),
            CliError::Engine(e) => {
                let kind = if self.exit_code() == 1 { "usage" } else { "math" };
                json!({"error": kind, "message": e.to_string()})
            }
            CliError::Usage(m) => json!({"error": "usage", "message": m}),
        }
    }
}

type CmdResult = Result<(String, Value), CliError>;

fn default_nodes() -> usize {
    std::env::var("PSO_PRECISION")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(verify::DEFAULT_NODES)
}

fn key_values(src: &str) -> Result<Vec<(String, String)>, CliError> {
    src.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got {p:?}")))
        })
        .collect()
}

fn rational_list(src: &str) -> Result<Vec<Rational>, CliError> {
    Ok(src.split(',').map(parse_rational).collect::<Result<_, _>>()?)
}

fn check(expr: &str) -> CmdResult {
    let op = parse_x(expr)?;
    let m = is_member(&op)?;
    let f = divide_by_g(&op)?;
    let text = format!(
        "member: {}\nresidual: {}\ncofactor: {}\nremainder: {}",
        m.is_member, m.residual, f.cofactor, f.remainder
    );
    let value = json!({
        "operator": json::operator(&op),
        "member": m.is_member,
        "residual": json::poly(&m.residual),
        "cofactor": json::operator(&f.cofactor),
        "remainder": json::poly(&f.remainder),
    });
    Ok((text, value))
}

fn basis(expr: &str) -> CmdResult {
    let op = parse_x(expr)?;
    let dec = basis_decompose(&op)?;
    let lines: Vec<String> = dec.iter().map(|((k, t), c)| format!("S({k},{t}): {c}")).collect();
    let terms: Vec<Value> = dec.iter().map(|((k, t), c)| json!({"k": k, "t": t, "coeff": json::rational(c)})).collect();
    Ok((lines.join("\n"), json!({"terms": terms})))
}

fn factor(expr: &str) -> CmdResult {
    let op = parse_x(expr)?;
    let f = divide_by_g(&op)?;
    let text = format!("cofactor: {}\nremainder: {}", f.cofactor, f.remainder);
    Ok((text, json!({"cofactor": json::operator(&f.cofactor), "remainder": json::poly(&f.remainder)})))
}

fn operator_output<S: pso_core::Scalar>(op: &WeylElement<S>) -> (String, Value) {
    (op.to_string(), json!({"text": op.to_string(), "operator": json::operator(op)}))
}

fn family(name: &str, params: &str) -> CmdResult {
    let kv = key_values(params)?;
    let get = |key: &str| -> Result<usize, CliError> {
        let v = kv
            .iter()
            .find(|(k, _)| k == key)
            .ok_or_else(|| CliError::Usage(format!("family {name} needs parameter {key}")))?;
        v.1.parse().map_err(|_| CliError::Usage(format!("parameter {key} must be a nonnegative integer")))
    };
    let fam = match name {
        "generator" => Family::Generator,
        "s" => Family::FirstOrderHermite { m: get("m")? },
        "l" => Family::HigherOrderHermite { m: get("m")? },
        "basis" => Family::Basis { k: get("k")?, t: get("t")? },
        "xpow" => Family::MonomialFirstOrder { n: get("n")? },
        "rodriguez" => Family::Rodriguez { m: get("m")? },
        "first-order" => {
            let src = kv
                .iter()
                .find(|(k, _)| k == "p")
                .ok_or_else(|| CliError::Usage("family first-order needs parameter p".into()))?;
            let p: Poly<GaussianRational> = parse_poly(&src.1, Var::X)?;
            Family::FirstOrder { p: p.to_real()? }
        }
        other => return Err(CliError::Usage(format!("unknown family {other:?}"))),
    };
    Ok(operator_output(&make_operator(&fam)?))
}

fn annihilates(expr: &str, cf: &str) -> CmdResult {
    let op = parse(expr, Var::T)?;
    let (mut sigma2, mut mu) = (Rational::from_integer(1.into()), Rational::from_integer(0.into()));
    for (k, v) in key_values(cf)? {
        match k.as_str() {
            "sigma2" => sigma2 = parse_rational(&v)?,
            "mu" => mu = parse_rational(&v)?,
            _ => return Err(CliError::Usage(format!("unknown cf parameter {k:?}"))),
        }
    }
    let residual = act_on_cf(&op, &CfFamily::new(sigma2, mu)?)?;
    let text = format!("annihilates: {}\nresidual: {}", residual.is_zero(), residual);
    Ok((text, json!({"annihilates": residual.is_zero(), "residual": json::poly(&residual)})))
}

/// `E[S x^n] == 0` exactly for `n <= 12`.
fn exact_report(s: &WeylElement<Rational>, dist: &DistributionSpec) -> Result<bool, CliError> {
    for n in 0..=12 {
        let f = Poly::monomial(Var::X, Rational::from_integer(1.into()), n);
        if exact_expectation(&s.apply(&f)?, dist)? != Rational::from_integer(0.into()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn numeric_report(rows: &[SuiteRow]) -> (f64, bool) {
    let max = rows.iter().map(|r| r.estimate.value.abs()).fold(0.0, f64::max);
    (max, max < verify::SMOOTH_TOLERANCE)
}

fn dist_report(s: &WeylElement<Rational>, dist: &DistributionSpec, nodes: usize) -> Result<(String, Value), CliError> {
    let exact = exact_report(s, dist)?;
    let rows = suite_table(s, dist, nodes)?;
    let (max, pass) = numeric_report(&rows);
    let text = format!("{dist}: exact polynomial check (degree <= 12): {exact}; suite max |E[Sf]| = {max:.3e} ({})",
        if pass { "pass" } else { "fail" });
    let value = json!({
        "distribution": dist.to_string(),
        "exact_polynomials_zero": exact,
        "suite": json::suite_rows(&rows),
        "suite_max": max,
        "suite_pass": pass,
    });
    Ok((text, value))
}

fn mixture(sigma2: &str, weights: Option<&str>, nodes: usize) -> CmdResult {
    let variances = rational_list(sigma2)?;
    let spec = match weights {
        Some(w) => MixtureSpec::new(variances, rational_list(w)?)?,
        None => MixtureSpec::with_equal_weights(variances)?,
    };
    let annihilator = mixture_annihilator(&spec)?;
    let s = mixture_stein_operator(&spec)?;
    let dist = DistributionSpec::mixture(spec.weights().to_vec(), spec.variances().to_vec())?;
    let (report_text, report) = dist_report(&s, &dist, nodes)?;
    let text = format!("annihilator: {annihilator}\nstein operator: {s}\n{report_text}");
    let value = json!({
        "annihilator": json::operator(&annihilator),
        "stein_operator": json::operator(&s),
        "text": s.to_string(),
        "report": report,
    });
    Ok((text, value))
}

fn intersect(radius: &str, nodes: usize) -> CmdResult {
    let r = parse_rational(radius)?;
    let semi = DistributionSpec::semicircle(r.clone())?;
    let s = intersection_operator(&semicircle_annihilator(&r))?;
    let (g_text, g) = dist_report(&s, &DistributionSpec::standard_gaussian(), nodes)?;
    let (s_text, sc) = dist_report(&s, &semi, nodes)?;
    let member = is_member(&s)?.is_member;
    let text = format!("operator: {s}\nmember of PSO(N): {member}\n{g_text}\n{s_text}");
    let value = json!({
        "operator": json::operator(&s),
        "text": s.to_string(),
        "member": member,
        "reports": [g, sc],
    });
    Ok((text, value))
}

fn classify_cmd(m: Option<usize>, upto: Option<usize>) -> CmdResult {
    let reports = match (m, upto) {
        (Some(m), _) => vec![classify::classify(m)?],
        (None, Some(u)) => classify::table(u)?,
        (None, None) => return Err(CliError::Usage("pass --m or --upto".into())),
    };
    let mut lines = vec!["m  characterising  branches".to_string()];
    for r in &reports {
        let kinds: Vec<&str> = r.branches.iter().map(|b| b.behaviour.name()).collect();
        lines.push(format!("{:<2} {:<15} {}", r.m, r.characterising, kinds.join(", ")));
    }
    Ok((lines.join("\n"), Value::Array(reports.iter().map(json::classification).collect())))
}

fn verify_cmd(expr: &str, dist: &str, nodes: usize) -> CmdResult {
    let op = parse_x(expr)?;
    let dist: DistributionSpec = dist.parse()?;
    let rows = suite_table(&op, &dist, nodes)?;
    let (max, pass) = numeric_report(&rows);
    let mut lines: Vec<String> = rows
        .iter()
        .map(|r| format!("{:<32} {:>12.3e}  (proxy {:.1e})", r.function, r.estimate.value, r.estimate.error_proxy))
        .collect();
    lines.push(format!("max |E[Sf]| = {max:.3e} ({})", if pass { "pass" } else { "fail" }));
    let value = json!({
        "distribution": dist.to_string(),
        "nodes": nodes,
        "suite_version": verify::SUITE_VERSION,
        "rows": json::suite_rows(&rows),
        "max": max,
        "pass": pass,
    });
    Ok((lines.join("\n"), value))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Check { expr } => check(expr),
        Command::Basis { expr } => basis(expr),
        Command::Factor { expr } => factor(expr),
        Command::Hermite { n } => {
            let h = hermite(*n);
            Ok((h.to_string(), json::poly(&h)))
        }
        Command::Mul { left, right, mode } => {
            let var = Var::from(*mode);
            Ok(operator_output(&(&parse(left, var)? * &parse(right, var)?)))
        }
        Command::Fourier { expr, inverse } => {
            if *inverse {
                Ok(operator_output(&psi_inverse(&parse(expr, Var::T)?)?))
            } else {
                Ok(operator_output(&psi(&parse_x(expr)?)?))
            }
        }
        Command::Annihilates { expr, cf } => annihilates(expr, cf),
        Command::Family { name, params } => family(name, params),
        Command::Lclm { left, right } => Ok(operator_output(&lclm_weyl(&parse(left, Var::T)?, &parse(right, Var::T)?)?)),
        Command::Mixture { sigma2, weights, nodes } => {
            mixture(sigma2, weights.as_deref(), nodes.unwrap_or_else(default_nodes))
        }
        Command::Intersect { with: Other::Semicircle, radius, nodes } => {
            intersect(radius, nodes.unwrap_or_else(default_nodes))
        }
        Command::Classify { m, upto } => classify_cmd(*m, *upto),
        Command::Verify { expr, dist, nodes } => verify_cmd(expr, dist, nodes.unwrap_or_else(default_nodes)),
        Command::Random { seed, member } => {
            let op = if *member {
                pso::random_member(*seed, MemberBounds::default())
            } else {
                pso::random_operator(*seed, 4, 4)
            };
            Ok(operator_output(&op))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let message = e.to_string().lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ").to_string();
            eprintln!("{}", json!({"error": "usage", "message": message}));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok((text, value)) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
            } else {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
