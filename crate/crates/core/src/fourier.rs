//! The Fourier anti-isomorphism between operators in `x` and operators in `t`,
//! and exact annihilation tests against Gaussian-type characteristic functions.
//!
//! `psi(x^n D^k) = i^(k-n) t^k D^n`. For a Stein operator `S` and a random
//! variable `X`, `psi(S) phi_X (t) = E[S e^{itX}]`, so `S` is a Stein operator
//! for `X` iff `psi(S)` annihilates the characteristic function of `X`.
//!
//! Under this rule `psi(D - x) = i (t + D)`; annihilation and ideal
//! membership are insensitive to such units, so they are only removed for
//! display ([`strip_leading_unit`]) or to recover real coefficients
//! ([`real_up_to_unit`]).

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{imag_pow, is_real, GaussianRational, Poly, Rational, Scalar, Var};
use crate::hermite::hermite;
use crate::weyl::{d_pow, Monomial, WeylElement};

/// Characteristic function `exp(-sigma2 t^2 / 2 + i mu t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfFamily {
    sigma2: Rational,
    mu: Rational,
}

impl CfFamily {
    pub fn new(sigma2: Rational, mu: Rational) -> Result<Self> {
        if sigma2.is_negative() {
            return Err(Error::InvalidParameter(format!("sigma2 must be nonnegative, got {sigma2}")));
        }
        Ok(CfFamily { sigma2, mu })
    }

    /// `exp(-t^2/2)`.
    pub fn standard_gaussian() -> Self {
        CfFamily { sigma2: Rational::one(), mu: Rational::zero() }
    }

    pub fn sigma2(&self) -> &Rational {
        &self.sigma2
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }
}

pub fn psi<S: Scalar>(s: &WeylElement<S>) -> Result<WeylElement<GaussianRational>> {
    s.var().expect(Var::X)?;
    Ok(WeylElement::from_terms(
        Var::T,
        s.terms().iter().map(|(m, c)| {
            let unit = imag_pow(m.dpow as i64 - m.varpow as i64);
            (Monomial::new(m.dpow, m.varpow), unit * c.to_complex())
        }),
    ))
}

/// Inverse of [`psi`]: `t^k D^n -> i^(n-k) x^n D^k`.
pub fn psi_inverse(a: &WeylElement<GaussianRational>) -> Result<WeylElement<GaussianRational>> {
    a.var().expect(Var::T)?;
    Ok(WeylElement::from_terms(
        Var::X,
        a.terms().iter().map(|(m, c)| {
            let unit = imag_pow(m.dpow as i64 - m.varpow as i64);
            (Monomial::new(m.dpow, m.varpow), unit * c.clone())
        }),
    ))
}

const UNITS: [i64; 4] = [0, 1, 2, 3];

fn leading_coeff<S: Scalar>(op: &WeylElement<S>) -> Option<&S> {
    op.terms().values().next_back()
}

/// Multiplies by the power of `i` that makes every coefficient real with a
/// positive leading coefficient (highest `D` power, then highest variable
/// power). Errors if no single power of `i` works.
pub fn real_up_to_unit(op: &WeylElement<GaussianRational>) -> Result<(GaussianRational, WeylElement<Rational>)> {
    if op.is_zero() {
        return Ok((GaussianRational::one(), WeylElement::zero(op.var())));
    }
    for k in UNITS {
        let unit = imag_pow(k);
        let scaled = op.scale(&unit);
        if let Ok(real) = scaled.to_real() {
            if leading_coeff(&real).is_some_and(Signed::is_positive) {
                return Ok((unit, real));
            }
        }
    }
    Err(Error::NoRealUnit)
}

/// Divides out the power of `i` (and sign) that makes the leading coefficient
/// positive real, when such a power exists; otherwise returns `op` unchanged.
pub fn strip_leading_unit(op: &WeylElement<GaussianRational>) -> WeylElement<GaussianRational> {
    let Some(lead) = leading_coeff(op) else {
        return op.clone();
    };
    UNITS
        .into_iter()
        .map(imag_pow)
        .find(|u| {
            let z = u.clone() * lead.clone();
            is_real(&z) && z.re.is_positive()
        })
        .map_or_else(|| op.clone(), |u| op.scale(&u))
}

/// The polynomial `q` with `A phi = q phi` for `phi` in the family; `A`
/// annihilates `phi` iff `q = 0`.
///
/// Uses `D (q phi) = (q' + (i mu - sigma2 t) q) phi`.
pub fn act_on_cf(a: &WeylElement<GaussianRational>, cf: &CfFamily) -> Result<Poly<GaussianRational>> {
    a.var().expect(Var::T)?;
    let Some(order) = a.d_order() else {
        return Ok(Poly::zero(Var::T));
    };
    let log_derivative = Poly::new(
        Var::T,
        vec![GaussianRational::new(Rational::zero(), cf.mu.clone()), GaussianRational::from_rational(-cf.sigma2.clone())],
    );
    let mut powers = Vec::with_capacity(order + 1);
    powers.push(Poly::one(Var::T));
    for n in 0..order {
        let q: &Poly<GaussianRational> = &powers[n];
        let next = &q.derivative() + &(&log_derivative * q);
        powers.push(next);
    }
    Ok(a.terms().iter().fold(Poly::zero(Var::T), |acc, (m, c)| {
        &acc + &powers[m.dpow].shift(m.varpow).scale(c)
    }))
}

pub fn annihilates(a: &WeylElement<GaussianRational>, cf: &CfFamily) -> Result<bool> {
    Ok(act_on_cf(a, cf)?.is_zero())
}

/// Does `a` annihilate `exp(-t^2/2)`?
pub fn annihilates_gaussian(a: &WeylElement<GaussianRational>) -> Result<bool> {
    annihilates(a, &CfFamily::standard_gaussian())
}

/// `D^m - (-1)^m H_m(t)`, the operator form of the Rodriguez formula.
pub fn rodriguez_annihilator(m: usize) -> WeylElement<GaussianRational> {
    let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
    let h = hermite(m).with_var(Var::T).scale(&sign).to_complex();
    &d_pow(Var::T, m) - &WeylElement::from_poly(&h)
}

/// Exact check of `D^m phi_N = (-1)^m H_m(t) phi_N`.
pub fn rodriguez_check(m: usize) -> Result<bool> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    annihilates_gaussian(&rodriguez_annihilator(m))
}
