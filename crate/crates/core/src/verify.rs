//! Expectation checks for Stein operators.
//!
//! Polynomial test functions are handled exactly through moment sequences.
//! Smooth test functions are handled by Gaussian quadrature: Gauss-Hermite
//! (probabilists' weight) for Gaussian components and Gauss-Chebyshev of the
//! second kind for the semicircle law.
//!
//! A fixed, finite test suite can only give evidence that `E[Sf(X)] = 0` for
//! all `f`; it never proves it. The exact polynomial path is the proof-grade
//! check for polynomial `f`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, double_factorial, rat, Poly, Rational, Var};
use crate::weyl::WeylElement;

pub const DEFAULT_NODES: usize = 64;
pub const MIN_NODES: usize = 8;
pub const SMOOTH_TOLERANCE: f64 = 1e-8;
pub const POLYNOMIAL_TOLERANCE: f64 = 1e-10;
/// Bumped whenever the contents of [`suite`] change.
pub const SUITE_VERSION: u32 = 1;

/// Node count and tolerances for numerical checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    pub nodes: usize,
    pub smooth_tolerance: f64,
    pub polynomial_tolerance: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { nodes: DEFAULT_NODES, smooth_tolerance: SMOOTH_TOLERANCE, polynomial_tolerance: POLYNOMIAL_TOLERANCE }
    }
}

/// Target law for expectation checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributionSpec {
    Gaussian { mu: Rational, sigma2: Rational },
    /// Centred Gaussian mixture.
    Mixture { weights: Vec<Rational>, variances: Vec<Rational> },
    /// Semicircle law on `[-radius, radius]`.
    Semicircle { radius: Rational },
}

impl DistributionSpec {
    pub fn gaussian(mu: Rational, sigma2: Rational) -> Result<Self> {
        if !sigma2.is_positive() {
            return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(DistributionSpec::Gaussian { mu, sigma2 })
    }

    pub fn standard_gaussian() -> Self {
        DistributionSpec::Gaussian { mu: Rational::zero(), sigma2: Rational::one() }
    }

    pub fn mixture(weights: Vec<Rational>, variances: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() || weights.len() != variances.len() {
            return Err(Error::InvalidParameter("mixture needs matching, nonempty weights and variances".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) || variances.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidParameter("mixture weights and variances must be positive".into()));
        }
        if weights.iter().fold(Rational::zero(), |a, w| a + w) != Rational::one() {
            return Err(Error::InvalidParameter("mixture weights must sum to 1".into()));
        }
        Ok(DistributionSpec::Mixture { weights, variances })
    }

    pub fn semicircle(radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        Ok(DistributionSpec::Semicircle { radius })
    }

    /// Exact `E[X^n]`.
    pub fn moment(&self, n: usize) -> Rational {
        match self {
            DistributionSpec::Gaussian { mu, sigma2 } => (0..=n)
                .step_by(2)
                .map(|j| {
                    let centred = centred_gaussian_moment(sigma2, j);
                    Rational::from_integer(binomial(n, j)) * pow(mu, n - j) * centred
                })
                .fold(Rational::zero(), |a, b| a + b),
            DistributionSpec::Mixture { weights, variances } => weights
                .iter()
                .zip(variances)
                .map(|(w, v)| w * centred_gaussian_moment(v, n))
                .fold(Rational::zero(), |a, b| a + b),
            DistributionSpec::Semicircle { radius } => {
                if n % 2 == 1 {
                    return Rational::zero();
                }
                let half = n / 2;
                let catalan = binomial(n, half) / BigInt::from(half + 1);
                Rational::from_integer(catalan) * pow(radius, n) / Rational::from_integer(BigInt::from(4).pow(half as u32))
            }
        }
    }
}

fn pow(r: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * r)
}

/// `E[(sigma Z)^n] = sigma2^(n/2) (n-1)!!` for even `n`, zero for odd `n`.
fn centred_gaussian_moment(sigma2: &Rational, n: usize) -> Rational {
    match n {
        0 => Rational::one(),
        _ if n % 2 == 1 => Rational::zero(),
        _ => pow(sigma2, n / 2) * Rational::from_integer(double_factorial(n - 1)),
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Gaussian { mu, sigma2 } => write!(f, "gaussian(mu={mu},sigma2={sigma2})"),
            DistributionSpec::Mixture { weights, variances } => {
                let parts: Vec<String> = weights.iter().zip(variances).map(|(w, v)| format!("{w}:{v}")).collect();
                write!(f, "mixture({})", parts.join(","))
            }
            DistributionSpec::Semicircle { radius } => write!(f, "semicircle(r={radius})"),
        }
    }
}

/// Parses `3`, `-2/7` or a decimal such as `0.25` into an exact rational.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = src.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {src:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: BigInt = if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().map_err(|_| bad())? };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let value = Rational::new(whole * &scale + frac_num, scale);
        return Ok(if negative { -value } else { value });
    }
    s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

fn parse_args<'a>(src: &'a str, name: &str) -> Result<&'a str> {
    src.strip_prefix(name)
        .and_then(|rest| rest.trim().strip_prefix('('))
        .and_then(|rest| rest.trim_end().strip_suffix(')'))
        .ok_or_else(|| Error::InvalidParameter(format!("malformed distribution {src:?}")))
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// `gaussian(mu=0,sigma2=1)`, `mixture(0.5:1,0.5:2)` (weight:variance
    /// pairs) or `semicircle(r=1)`.
    fn from_str(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.starts_with("gaussian") {
            let (mut mu, mut sigma2) = (Rational::zero(), Rational::one());
            for kv in parse_args(&s, "gaussian")?.split(',').filter(|p| !p.is_empty()) {
                match kv.split_once('=') {
                    Some(("mu", v)) => mu = parse_rational(v)?,
                    Some(("sigma2", v)) => sigma2 = parse_rational(v)?,
                    _ => return Err(Error::InvalidParameter(format!("unknown gaussian parameter {kv:?}"))),
                }
            }
            Self::gaussian(mu, sigma2)
        } else if s.starts_with("mixture") {
            let mut weights = Vec::new();
            let mut variances = Vec::new();
            for pair in parse_args(&s, "mixture")?.split(',') {
                let (w, v) = pair
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter(format!("expected weight:variance, got {pair:?}")))?;
                weights.push(parse_rational(w)?);
                variances.push(parse_rational(v)?);
            }
            Self::mixture(weights, variances)
        } else if s.starts_with("semicircle") {
            let mut radius = Rational::one();
            for kv in parse_args(&s, "semicircle")?.split(',').filter(|p| !p.is_empty()) {
                match kv.split_once('=') {
                    Some(("r", v)) | Some(("radius", v)) => radius = parse_rational(v)?,
                    _ => return Err(Error::InvalidParameter(format!("unknown semicircle parameter {kv:?}"))),
                }
            }
            Self::semicircle(radius)
        } else {
            Err(Error::InvalidParameter(format!("unknown distribution {src:?}")))
        }
    }
}

/// Exact `E[f(X)]` for polynomial `f`.
pub fn exact_expectation(f: &Poly<Rational>, dist: &DistributionSpec) -> Result<Rational> {
    f.var().expect(Var::X)?;
    Ok(f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(Rational::zero(), |acc, (n, c)| acc + c * dist.moment(n)))
}

/// Truncated Taylor series `sum a_k (x - x0)^k`, used to get derivatives of
/// the test functions to any order.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet(Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut a = vec![0.0; order + 1];
        a[0] = c;
        Jet(a)
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut a = vec![0.0; order + 1];
        a[0] = x0;
        if order >= 1 {
            a[1] = 1.0;
        }
        Jet(a)
    }

    fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * c).collect())
    }

    pub fn shift(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.0[0] += c;
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.order();
        Jet((0..=n).map(|k| (0..=k).map(|j| self.0[j] * other.0[k - j]).sum()).collect())
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut b = vec![0.0; n + 1];
        b[0] = self.0[0].exp();
        for k in 1..=n {
            b[k] = (1..=k).map(|j| j as f64 * self.0[j] * b[k - j]).sum::<f64>() / k as f64;
        }
        Jet(b)
    }

    /// `(sin, cos)` of the jet.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        (s[0], c[0]) = self.0[0].sin_cos();
        for k in 1..=n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                ds += j as f64 * self.0[j] * c[k - j];
                dc -= j as f64 * self.0[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// Derivatives `f(x0), f'(x0), ..., f^(order)(x0)`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if k > 0 {
                    fact *= k as f64;
                }
                a * fact
            })
            .collect()
    }
}

/// Smooth test functions with derivatives of every order.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Polynomial(Poly<Rational>),
    Sin { freq: Rational },
    Cos { freq: Rational },
    /// `exp(-x^2/4) cos(freq x)`.
    DampedCos { freq: Rational },
    /// `exp(-x^2/4) sin(freq x)`.
    DampedSin { freq: Rational },
    /// `exp(-(x - center)^2 / (2 width2))`.
    Bump { center: Rational, width2: Rational },
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl TestFunction {
    pub fn name(&self) -> String {
        let arg = |freq: &Rational| if freq.is_one() { "x".to_string() } else { format!("{freq}*x") };
        match self {
            TestFunction::Polynomial(p) => format!("poly[{p}]"),
            TestFunction::Sin { freq } => format!("sin({})", arg(freq)),
            TestFunction::Cos { freq } => format!("cos({})", arg(freq)),
            TestFunction::DampedCos { freq } => format!("exp(-x^2/4)*cos({})", arg(freq)),
            TestFunction::DampedSin { freq } => format!("exp(-x^2/4)*sin({})", arg(freq)),
            TestFunction::Bump { center, width2 } => format!("exp(-(x-{center})^2/(2*{width2}))"),
        }
    }

    /// `f(x), f'(x), ..., f^(order)(x)`.
    pub fn derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        let v = Jet::variable(x, order);
        let damping = || v.mul(&v).scale(-0.25).exp();
        let jet = match self {
            TestFunction::Polynomial(p) => p
                .to_f64_coeffs()
                .iter()
                .rev()
                .fold(Jet::constant(0.0, order), |acc, c| acc.mul(&v).shift(*c)),
            TestFunction::Sin { freq } => v.scale(to_f64(freq)).sin_cos().0,
            TestFunction::Cos { freq } => v.scale(to_f64(freq)).sin_cos().1,
            TestFunction::DampedCos { freq } => damping().mul(&v.scale(to_f64(freq)).sin_cos().1),
            TestFunction::DampedSin { freq } => damping().mul(&v.scale(to_f64(freq)).sin_cos().0),
            TestFunction::Bump { center, width2 } => {
                let u = v.shift(-to_f64(center));
                u.mul(&u).scale(-0.5 / to_f64(width2)).exp()
            }
        };
        jet.derivatives()
    }
}

/// The fixed verification suite (version [`SUITE_VERSION`]).
pub fn suite() -> Vec<TestFunction> {
    let x = |coeffs: &[i64]| Poly::new(Var::X, coeffs.iter().map(|&c| rat(c, 1)).collect());
    vec![
        TestFunction::Polynomial(x(&[1])),
        TestFunction::Polynomial(x(&[0, 1])),
        TestFunction::Polynomial(x(&[0, -2, 0, 1])),
        TestFunction::Polynomial(Poly::new(Var::X, vec![rat(1, 1), rat(0, 1), rat(-1, 2), rat(0, 1), rat(1, 8)])),
        TestFunction::Sin { freq: rat(1, 2) },
        TestFunction::Cos { freq: rat(1, 2) },
        TestFunction::Sin { freq: rat(1, 1) },
        TestFunction::Cos { freq: rat(3, 4) },
        TestFunction::DampedCos { freq: rat(1, 1) },
        TestFunction::DampedSin { freq: rat(1, 1) },
        TestFunction::Bump { center: rat(1, 2), width2: rat(1, 1) },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKind {
    /// Nodes and weights for `E[g(N)]`, `N ~ N(0, 1)`.
    StandardGaussian,
    /// Nodes and weights for the semicircle law on `[-1, 1]`.
    UnitSemicircle,
}

/// Quadrature nodes and weights; weights sum to the total mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * g(*x)).sum()
    }
}

fn rule_cache() -> &'static Mutex<HashMap<(RuleKind, usize), Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(RuleKind, usize), Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached_rule(kind: RuleKind, n: usize) -> Arc<QuadratureRule> {
    let mut cache = rule_cache().lock().expect("quadrature cache poisoned");
    cache
        .entry((kind, n))
        .or_insert_with(|| {
            Arc::new(match kind {
                RuleKind::StandardGaussian => build_gauss_hermite(n),
                RuleKind::UnitSemicircle => build_gauss_chebyshev_u(n),
            })
        })
        .clone()
}

/// `n`-point Gauss rule for the standard Gaussian law.
pub fn gauss_hermite(n: usize) -> Arc<QuadratureRule> {
    cached_rule(RuleKind::StandardGaussian, n)
}

/// `n`-point Gauss rule for the semicircle law on `[-1, 1]`.
pub fn gauss_chebyshev_u(n: usize) -> Arc<QuadratureRule> {
    cached_rule(RuleKind::UnitSemicircle, n)
}

/// Orthonormal Hermite values `(psi_n(x), psi_{n-1}(x))` by the three-term
/// recurrence `psi_{j+1} = (x psi_j - sqrt(j) psi_{j-1}) / sqrt(j+1)`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..n {
        let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Roots of `H_n` by Newton's method from asymptotic initial guesses, with
/// weights `1 / (n psi_{n-1}(x)^2)`. Nodes are mirrored so the rule is
/// exactly symmetric.
fn build_gauss_hermite(n: usize) -> QuadratureRule {
    assert!(n >= 1, "quadrature needs at least one node");
    let half = n.div_ceil(2);
    let mut roots: Vec<f64> = Vec::with_capacity(half);
    let nf = n as f64;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut z: f64 = 0.0;
    for i in 0..half {
        // Initial guesses in the physicists' scale, then rescaled.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0] / sqrt2,
            3 => 1.91 * z - 0.91 * roots[1] / sqrt2,
            _ => 2.0 * z - roots[i - 2] / sqrt2,
        };
        let mut x = z * sqrt2;
        for _ in 0..100 {
            let (p, pm1) = orthonormal_hermite(n, x);
            let dx = p / (nf.sqrt() * pm1);
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        if n % 2 == 1 && i == half - 1 {
            x = 0.0;
        }
        roots.push(x);
        z = x / sqrt2;
    }
    let weight = |x: f64| {
        let (_, pm1) = orthonormal_hermite(n, x);
        1.0 / (nf * pm1 * pm1)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x in &roots {
        nodes.push(-x);
        weights.push(weight(x));
    }
    let mirror = if n % 2 == 1 { half - 1 } else { half };
    for &x in roots[..mirror].iter().rev() {
        nodes.push(x);
        weights.push(weight(x));
    }
    QuadratureRule { nodes, weights }
}

/// Nodes `cos(j pi / (n+1))`, weights `2/(n+1) sin^2(j pi / (n+1))`: the
/// Chebyshev-U rule normalised to the semicircle density `(2/pi) sqrt(1-x^2)`.
fn build_gauss_chebyshev_u(n: usize) -> QuadratureRule {
    let step = std::f64::consts::PI / (n + 1) as f64;
    let (nodes, weights) = (1..=n)
        .map(|j| {
            let (s, c) = (j as f64 * step).sin_cos();
            (c, 2.0 / (n + 1) as f64 * s * s)
        })
        .unzip();
    QuadratureRule { nodes, weights }
}

/// Combined nodes and weights for `dist`.
pub fn rule_for(dist: &DistributionSpec, n: usize) -> QuadratureRule {
    match dist {
        DistributionSpec::Gaussian { mu, sigma2 } => {
            let base = gauss_hermite(n);
            let (mu, sigma) = (to_f64(mu), to_f64(sigma2).sqrt());
            QuadratureRule { nodes: base.nodes.iter().map(|z| mu + sigma * z).collect(), weights: base.weights.clone() }
        }
        DistributionSpec::Mixture { weights, variances } => {
            let base = gauss_hermite(n);
            let mut nodes = Vec::with_capacity(n * weights.len());
            let mut out_w = Vec::with_capacity(n * weights.len());
            for (w, v) in weights.iter().zip(variances) {
                let (w, sigma) = (to_f64(w), to_f64(v).sqrt());
                nodes.extend(base.nodes.iter().map(|z| sigma * z));
                out_w.extend(base.weights.iter().map(|bw| w * bw));
            }
            QuadratureRule { nodes, weights: out_w }
        }
        DistributionSpec::Semicircle { radius } => {
            let base = gauss_chebyshev_u(n);
            let r = to_f64(radius);
            QuadratureRule { nodes: base.nodes.iter().map(|x| r * x).collect(), weights: base.weights.clone() }
        }
    }
}

/// Quadrature estimate, the error proxy `|Q_n - Q_2n|`, and the magnitude
/// `sum w |g(x)|` of the quadrature sum. Rounding error is bounded by a
/// small multiple of `scale * f64::EPSILON`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEstimate {
    pub value: f64,
    pub error_proxy: f64,
    pub scale: f64,
}

impl NumericEstimate {
    /// `|value - target| <= tol * max(1, scale)`.
    pub fn agrees_with(&self, target: f64, tol: f64) -> bool {
        (self.value - target).abs() <= tol * self.scale.max(1.0)
    }
}

impl QuadratureRule {
    /// `sum w |g(x)|`.
    pub fn magnitude(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.integrate(|x| g(x).abs())
    }
}

/// `(S f)(x)` in double precision.
pub fn apply_numeric(s: &WeylElement<Rational>, f: &TestFunction, x: f64) -> f64 {
    let order = s.d_order().unwrap_or(0);
    let derivs = f.derivatives(x, order);
    s.terms().iter().map(|(m, c)| to_f64(c) * x.powi(m.varpow as i32) * derivs[m.dpow]).sum()
}

/// Quadrature estimate of `E[(S f)(X)]`.
pub fn numeric_expectation(
    s: &WeylElement<Rational>,
    f: &TestFunction,
    dist: &DistributionSpec,
    nodes: usize,
) -> Result<NumericEstimate> {
    s.var().expect(Var::X)?;
    if nodes < MIN_NODES {
        return Err(Error::InvalidParameter(format!("at least {MIN_NODES} nodes are required, got {nodes}")));
    }
    let rule = rule_for(dist, nodes);
    let values: Vec<f64> = rule.nodes.iter().map(|&x| apply_numeric(s, f, x)).collect();
    let value = values.iter().zip(&rule.weights).map(|(v, w)| v * w).sum();
    let scale = values.iter().zip(&rule.weights).map(|(v, w)| v.abs() * w).sum();
    let refined = rule_for(dist, 2 * nodes).integrate(|x| apply_numeric(s, f, x));
    Ok(NumericEstimate { value, error_proxy: (value - refined).abs(), scale })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub function: String,
    pub estimate: NumericEstimate,
}

/// `E[(S f)(X)]` for every function of the suite, in suite order. The
/// functions are evaluated on scoped threads.
pub fn suite_table(s: &WeylElement<Rational>, dist: &DistributionSpec, nodes: usize) -> Result<Vec<SuiteRow>> {
    let functions = suite();
    let results: Vec<Result<NumericEstimate>> = std::thread::scope(|scope| {
        let handles: Vec<_> = functions
            .iter()
            .map(|f| scope.spawn(move || numeric_expectation(s, f, dist, nodes)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite worker panicked")).collect()
    });
    functions
        .iter()
        .zip(results)
        .map(|(f, r)| Ok(SuiteRow { function: f.name(), estimate: r? }))
        .collect()
}

/// `max |E[(S f)(X)]|` over the suite.
pub fn discrepancy_probe(s: &WeylElement<Rational>, dist: &DistributionSpec, nodes: usize) -> Result<f64> {
    Ok(suite_table(s, dist, nodes)?
        .iter()
        .map(|row| row.estimate.value.abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::pso::{random_member, stein_generator, MemberBounds};

    fn px(coeffs: &[i64]) -> Poly<Rational> {
        Poly::new(Var::X, coeffs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn exact_expectation_examples() {
        let semi = DistributionSpec::semicircle(int(1)).unwrap();
        assert_eq!(exact_expectation(&px(&[0, 0, 1]), &semi).unwrap(), rat(1, 4));
        assert_eq!(exact_expectation(&px(&[0, 0, 0, 0, 1]), &DistributionSpec::standard_gaussian()).unwrap(), int(3));
        let mix = DistributionSpec::mixture(vec![rat(1, 2), rat(1, 2)], vec![int(1), int(2)]).unwrap();
        assert_eq!(exact_expectation(&px(&[0, 0, 1]), &mix).unwrap(), rat(3, 2));
    }

    #[test]
    fn semicircle_second_moment_matches_quadrature() {
        let rule = gauss_chebyshev_u(16);
        assert!((rule.integrate(|x| x * x) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn shifted_gaussian_moments() {
        // E[(1 + 2Z)^3] with sigma2 = 4: mu^3 + 3 mu sigma2 = 1 + 12
        let g = DistributionSpec::gaussian(int(1), int(4)).unwrap();
        assert_eq!(g.moment(3), int(13));
        assert_eq!(DistributionSpec::gaussian(int(0), int(2)).unwrap().moment(4), int(12));
    }

    #[test]
    fn distribution_grammar() {
        assert_eq!("gaussian(mu=0,sigma2=1)".parse::<DistributionSpec>().unwrap(), DistributionSpec::standard_gaussian());
        assert_eq!(
            "mixture(0.5:1, 1/2:2)".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::mixture(vec![rat(1, 2), rat(1, 2)], vec![int(1), int(2)]).unwrap()
        );
        assert_eq!("semicircle(r=1)".parse::<DistributionSpec>().unwrap(), DistributionSpec::semicircle(int(1)).unwrap());
        assert!("mixture(0.5:1)".parse::<DistributionSpec>().is_err());
        assert!("gaussian(sigma2=0)".parse::<DistributionSpec>().is_err());
        assert!("cauchy()".parse::<DistributionSpec>().is_err());
        let d = DistributionSpec::mixture(vec![rat(3, 10), rat(7, 10)], vec![int(1), int(2)]).unwrap();
        assert_eq!(d.to_string().parse::<DistributionSpec>().unwrap(), d);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn jets_give_derivatives() {
        let f = TestFunction::DampedCos { freq: int(1) };
        let x = 0.7_f64;
        let d = f.derivatives(x, 2);
        let e = (-x * x / 4.0).exp();
        assert!((d[0] - e * x.cos()).abs() < 1e-15);
        let d1 = e * (-x / 2.0 * x.cos() - x.sin());
        assert!((d[1] - d1).abs() < 1e-15);
        let p = TestFunction::Polynomial(px(&[0, 0, 0, 1]));
        assert_eq!(p.derivatives(2.0, 4), vec![8.0, 12.0, 12.0, 6.0, 0.0]);
    }

    #[test]
    fn gauss_hermite_sanity() {
        for n in [8, 9, 16, 33, 64, 128] {
            let rule = gauss_hermite(n);
            assert_eq!(rule.nodes.len(), n);
            assert!(rule.weights.iter().all(|w| *w > 0.0));
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13, "mass at n = {n}");
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]), "ordering at n = {n}");
        }
        let semi = gauss_chebyshev_u(64);
        assert!((semi.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn examples_from_numeric_expectation() {
        let g = stein_generator();
        let f = TestFunction::Bump { center: int(0), width2: int(2) };
        let est = numeric_expectation(&g, &f, &DistributionSpec::standard_gaussian(), 64).unwrap();
        assert!(est.value.abs() < 1e-12, "{est:?}");
        assert!(numeric_expectation(&g, &f, &DistributionSpec::standard_gaussian(), 4).is_err());
    }

    #[test]
    fn probe_examples() {
        let g = stein_generator();
        assert!(discrepancy_probe(&g, &DistributionSpec::standard_gaussian(), 64).unwrap() < 1e-10);
        let shifted = DistributionSpec::gaussian(int(1), int(1)).unwrap();
        assert!(discrepancy_probe(&g, &shifted, 64).unwrap() >= 0.5);
        assert_eq!(discrepancy_probe(&WeylElement::zero(Var::X), &shifted, 64).unwrap(), 0.0);
    }

    #[test]
    fn members_pass_the_probe() {
        for seed in 0..5 {
            let s = random_member(seed, MemberBounds { max_k: 3, max_t: 3, max_terms: 3 });
            let probe = discrepancy_probe(&s, &DistributionSpec::standard_gaussian(), 64).unwrap();
            assert!(probe < SMOOTH_TOLERANCE, "seed {seed}: {probe}");
        }
    }
}
