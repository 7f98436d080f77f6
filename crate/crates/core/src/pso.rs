//! Decision procedures and constructions for the Stein operators of the
//! standard Gaussian law, `PSO(N)`: the right ideal of the Weyl algebra
//! generated by `G = D - x`.
//!
//! A polynomial operator `S = sum_t p_t D^t` is a Gaussian Stein operator
//! iff `p_0 + sum_{t>=1} delta^t p_t = 0`. Equivalently it factors as
//! `S = G Q` with no remainder, and it has the basis
//! `S(k, t) = H_k D^t - H_{k+t}` for `k >= 0`, `t >= 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{int, rat, Poly, Rational, Var};
use crate::fourier;
use crate::hermite::{delta, gaussian_expectation, hermite, hermite_table, to_hermite};
use crate::weyl::{d_pow, Monomial, WeylElement};

type Op = WeylElement<Rational>;

/// The classical Stein operator `G = D - x`.
pub fn stein_generator() -> Op {
    &Op::derivation(Var::X) - &Op::variable(Var::X)
}

/// Result of the membership test. `residual` is
/// `p_0 + sum_t delta^t p_t`, zero exactly for members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub is_member: bool,
    pub residual: Poly<Rational>,
}

pub fn is_member(s: &Op) -> Result<Membership> {
    s.var().expect(Var::X)?;
    let coeffs = s.coefficient_form();
    let mut residual = Poly::zero(Var::X);
    // Horner in delta: p_0 + delta(p_1 + delta(p_2 + ...)).
    for p in coeffs.iter().skip(1).rev() {
        residual = delta(&(&residual + p))?;
    }
    if let Some(p0) = coeffs.first() {
        residual = &residual + p0;
    }
    Ok(Membership { is_member: residual.is_zero(), residual })
}

/// `S(k, t) = H_k D^t - H_{k+t}`. Zero when `t = 0`.
pub fn basis_element(k: usize, t: usize) -> Op {
    let hk = Op::from_poly(&hermite(k));
    &(&hk * &d_pow(Var::X, t)) - &Op::from_poly(&hermite(k + t))
}

/// Coefficients `c_{k,t}` of a member in the basis `S(k, t)`, `t >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HermiteDecomposition(BTreeMap<(usize, usize), Rational>);

impl HermiteDecomposition {
    pub fn get(&self, k: usize, t: usize) -> Rational {
        self.0.get(&(k, t)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Entries keyed by `(k, t)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> {
        self.0.iter().map(|(kt, c)| (*kt, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum c_{k,t} S(k, t)`.
    pub fn expand(&self) -> Op {
        self.0
            .iter()
            .fold(Op::zero(Var::X), |acc, ((k, t), c)| &acc + &basis_element(*k, *t).scale(c))
    }
}

pub fn basis_decompose(s: &Op) -> Result<HermiteDecomposition> {
    let membership = is_member(s)?;
    if !membership.is_member {
        return Err(Error::NotMember { residual: membership.residual.to_string() });
    }
    let mut out = BTreeMap::new();
    for (t, p) in s.coefficient_form().iter().enumerate().skip(1) {
        for (k, c) in to_hermite(p)?.iter() {
            out.insert((k, t), c.clone());
        }
    }
    Ok(HermiteDecomposition(out))
}

/// `S = G * cofactor + remainder`, with the remainder a multiplication
/// operator. The remainder vanishes exactly for members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFactorization {
    pub cofactor: Op,
    pub remainder: Poly<Rational>,
}

impl GFactorization {
    pub fn recompose(&self) -> Op {
        &(&stein_generator() * &self.cofactor) + &Op::from_poly(&self.remainder)
    }
}

/// Left division by `G`, top-down:
/// `q_{T-1} = p_T`, `q_{s-1} = p_s - q_s' + x q_s`, remainder
/// `p_0 - (q_0' - x q_0)`.
pub fn divide_by_g(s: &Op) -> Result<GFactorization> {
    s.var().expect(Var::X)?;
    let p = s.coefficient_form();
    if p.len() <= 1 {
        let remainder = p.into_iter().next().unwrap_or_else(|| Poly::zero(Var::X));
        return Ok(GFactorization { cofactor: Op::zero(Var::X), remainder });
    }
    let order = p.len() - 1;
    let mut q = vec![Poly::zero(Var::X); order];
    q[order - 1] = p[order].clone();
    for s_idx in (1..order).rev() {
        q[s_idx - 1] = &(&p[s_idx] - &q[s_idx].derivative()) + &q[s_idx].shift(1);
    }
    let remainder = &p[0] - &(&q[0].derivative() - &q[0].shift(1));
    let cofactor = Op::from_coefficient_form(Var::X, &q)?;
    Ok(GFactorization { cofactor, remainder })
}

/// Index conventions for the cofactor `Q` with `G Q = S(k, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CofactorConvention {
    /// `sum_{r=1}^t H_{k+t+1-r} D^{r-1}`; telescopes to `S(k+1, t)`.
    Unshifted,
    /// `sum_{r=1}^t H_{k+t-r} D^{r-1}`; telescopes to `S(k, t)`.
    Shifted,
}

impl CofactorConvention {
    pub const ALL: [CofactorConvention; 2] = [CofactorConvention::Unshifted, CofactorConvention::Shifted];

    pub fn formula(self) -> &'static str {
        match self {
            CofactorConvention::Unshifted => "sum_{r=1}^t H_{k+t+1-r} D^{r-1}",
            CofactorConvention::Shifted => "sum_{r=1}^t H_{k+t-r} D^{r-1}",
        }
    }
}

impl fmt::Display for CofactorConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.formula())
    }
}

pub fn cofactor_candidate(k: usize, t: usize, convention: CofactorConvention) -> Op {
    let offset = match convention {
        CofactorConvention::Unshifted => 1,
        CofactorConvention::Shifted => 0,
    };
    let table = hermite_table(k + t + 1 + offset);
    (1..=t).fold(Op::zero(Var::X), |acc, r| {
        let h = Op::from_poly(&table[k + t + offset - r]);
        &acc + &(&h * &d_pow(Var::X, r - 1))
    })
}

/// A cofactor `Q` with `G Q = S(k, t)`, together with the index convention
/// that produced it. Each candidate is checked by exact multiplication.
pub fn cofactor_of_basis(k: usize, t: usize) -> Result<(Op, CofactorConvention)> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let target = basis_element(k, t);
    let g = stein_generator();
    CofactorConvention::ALL
        .into_iter()
        .map(|conv| (cofactor_candidate(k, t, conv), conv))
        .find(|(q, _)| &g * q == target)
        .ok_or_else(|| Error::Postcondition(format!("no cofactor convention reproduces S({k},{t})")))
}

/// Named operator families, all members of `PSO(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// `D - x`.
    Generator,
    /// `S_m = H_{m-1} D - H_m`.
    FirstOrderHermite { m: usize },
    /// `L_m = D^m - H_m`.
    HigherOrderHermite { m: usize },
    /// `S(k, t) = H_k D^t - H_{k+t}`.
    Basis { k: usize, t: usize },
    /// `x^n D + (n x^{n-1} - x^{n+1})`.
    MonomialFirstOrder { n: usize },
    /// `p D - delta p`.
    FirstOrder { p: Poly<Rational> },
    /// Inverse Fourier image of `D^m - (-1)^m H_m(t)`, made real by a power of `i`.
    Rodriguez { m: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Generator => "generator",
            Family::FirstOrderHermite { .. } => "s",
            Family::HigherOrderHermite { .. } => "l",
            Family::Basis { .. } => "basis",
            Family::MonomialFirstOrder { .. } => "xpow",
            Family::FirstOrder { .. } => "first-order",
            Family::Rodriguez { .. } => "rodriguez",
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

pub fn make_operator(family: &Family) -> Result<Op> {
    let x = Var::X;
    match family {
        Family::Generator => Ok(stein_generator()),
        Family::FirstOrderHermite { m } => {
            require(*m >= 1, "m must be at least 1")?;
            Ok(&(&Op::from_poly(&hermite(m - 1)) * &Op::derivation(x)) - &Op::from_poly(&hermite(*m)))
        }
        Family::HigherOrderHermite { m } => {
            require(*m >= 1, "m must be at least 1")?;
            Ok(&d_pow(x, *m) - &Op::from_poly(&hermite(*m)))
        }
        Family::Basis { k, t } => {
            require(*t >= 1, "t must be at least 1")?;
            Ok(basis_element(*k, *t))
        }
        Family::MonomialFirstOrder { n } => {
            let n = *n;
            let mut terms = vec![(Monomial::new(n, 1), int(1)), (Monomial::new(n + 1, 0), int(-1))];
            if n >= 1 {
                terms.push((Monomial::new(n - 1, 0), int(n as i64)));
            }
            Ok(Op::from_terms(x, terms))
        }
        Family::FirstOrder { p } => {
            p.var().expect(x)?;
            require(!p.is_zero(), "p must be nonzero")?;
            Ok(&(&Op::from_poly(p) * &Op::derivation(x)) - &Op::from_poly(&delta(p)?))
        }
        Family::Rodriguez { m } => {
            require(*m >= 1, "m must be at least 1")?;
            let annihilator = fourier::rodriguez_annihilator(*m);
            let (_, real) = fourier::real_up_to_unit(&fourier::psi_inverse(&annihilator)?)?;
            Ok(real)
        }
    }
}

/// `E[(S f)(N)]`, computed exactly from Gaussian moments.
pub fn exact_zero_expectation(s: &Op, f: &Poly<Rational>) -> Result<Rational> {
    gaussian_expectation(&s.apply(f)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemberBounds {
    pub max_k: usize,
    pub max_t: usize,
    pub max_terms: usize,
}

impl Default for MemberBounds {
    fn default() -> Self {
        MemberBounds { max_k: 4, max_t: 4, max_terms: 4 }
    }
}

/// A random rational combination of basis elements `S(k, t)`; deterministic
/// in `seed`.
pub fn random_member(seed: u64, bounds: MemberBounds) -> Op {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = rng.gen_range(1..=bounds.max_terms.max(1));
    let t_max = bounds.max_t.max(1);
    let mut out = Op::zero(Var::X);
    for _ in 0..terms {
        let k = rng.gen_range(0..=bounds.max_k);
        let t = rng.gen_range(1..=t_max);
        let num = loop {
            let n: i64 = rng.gen_range(-9..=9);
            if n != 0 {
                break n;
            }
        };
        let den: i64 = rng.gen_range(1..=5);
        out = &out + &basis_element(k, t).scale(&rat(num, den));
    }
    out
}

/// A random operator with no structure imposed; deterministic in `seed`.
pub fn random_operator(seed: u64, max_pow: usize, max_terms: usize) -> Op {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = rng.gen_range(1..=max_terms.max(1));
    Op::from_terms(
        Var::X,
        (0..terms).map(|_| {
            let m = Monomial::new(rng.gen_range(0..=max_pow), rng.gen_range(0..=max_pow));
            (m, rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
        }),
    )
}

impl Membership {
    pub fn witness(&self) -> &Poly<Rational> {
        &self.residual
    }
}

/// `S + 1` is never a member when `S` is: constants fail `E[1 f] = 0` for `f = 1`.
pub fn perturb_constant(s: &Op) -> Op {
    s + &Op::scalar(Var::X, Rational::one())
}
