//! Normal-form arithmetic in the first Weyl algebra.
//!
//! An element is stored as a map from monomials `var^n D^k` (powers of the
//! variable written to the left of powers of the derivation) to nonzero
//! scalars. Every constructor canonicalizes, so equality is map equality.

use std::collections::BTreeMap;
use std::ops::Neg;



use crate::error::{Error, Result};
use crate::exact::{binomial, falling_factorial, forward_checked_binops, GaussianRational, Poly, Rational, Scalar, Var};

/// `var^varpow D^dpow`. Ordered by `(dpow, varpow)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub dpow: usize,
    pub varpow: usize,
}

impl Monomial {
    pub fn new(varpow: usize, dpow: usize) -> Self {
        Monomial { dpow, varpow }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement<S> {
    var: Var,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> WeylElement<S> {
    pub fn zero(var: Var) -> Self {
        WeylElement { var, terms: BTreeMap::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::scalar(var, S::one())
    }

    pub fn scalar(var: Var, c: S) -> Self {
        Self::monomial(var, c, 0, 0)
    }

    /// `c * var^varpow * D^dpow`.
    pub fn monomial(var: Var, c: S, varpow: usize, dpow: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(varpow, dpow), c);
        }
        WeylElement { var, terms }
    }

    /// The multiplication operator by the variable.
    pub fn variable(var: Var) -> Self {
        Self::monomial(var, S::one(), 1, 0)
    }

    /// The derivation `D`.
    pub fn derivation(var: Var) -> Self {
        Self::monomial(var, S::one(), 0, 1)
    }

    pub fn from_terms(var: Var, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut out = Self::zero(var);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    /// Multiplication operator by a polynomial.
    pub fn from_poly(p: &Poly<S>) -> Self {
        Self::from_coefficient_form(p.var(), std::slice::from_ref(p)).expect("single variable")
    }

    /// Builds `sum_t p_t D^t` from its coefficient polynomials.
    pub fn from_coefficient_form(var: Var, coeffs: &[Poly<S>]) -> Result<Self> {
        let mut out = Self::zero(var);
        for (dpow, p) in coeffs.iter().enumerate() {
            var.check(p.var())?;
            for (varpow, c) in p.coeffs().iter().enumerate() {
                out.add_term(Monomial::new(varpow, dpow), c.clone());
            }
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, S> {
        &self.terms
    }

    pub fn coeff(&self, varpow: usize, dpow: usize) -> S {
        self.terms.get(&Monomial::new(varpow, dpow)).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Order in `D`; `None` for the zero element.
    pub fn d_order(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.dpow).max()
    }

    /// Degree in the variable; `None` for the zero element.
    pub fn var_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.varpow).max()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.var, self.terms.iter().map(|(m, a)| (*m, a.clone() * c.clone())))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    /// Normally ordered product, using
    /// `D^k x^m = sum_r C(k, r) m!/(m-r)! x^(m-r) D^(k-r)`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        let mut out = Self::zero(self.var);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca.clone() * cb.clone();
                for r in 0..=a.dpow.min(b.varpow) {
                    let weight = binomial(a.dpow, r) * falling_factorial(b.varpow, r);
                    out.add_term(
                        Monomial::new(a.varpow + b.varpow - r, a.dpow + b.dpow - r),
                        c.clone() * S::from_integer(weight),
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(self.var), |acc, _| &acc * self)
    }

    /// Action on polynomials: `sum c var^n (d/dvar)^k f`.
    pub fn apply(&self, f: &Poly<S>) -> Result<Poly<S>> {
        self.var.check(f.var())?;
        let mut out = Poly::zero(self.var);
        for (m, c) in &self.terms {
            let term = f.nth_derivative(m.dpow).shift(m.varpow).scale(c);
            out = &out + &term;
        }
        Ok(out)
    }

    /// `sum c (-1)^k D^k . var^n`, returned in normal order.
    pub fn formal_adjoint(&self) -> Self {
        let mut out = Self::zero(self.var);
        for (m, c) in &self.terms {
            let d = Self::monomial(self.var, S::one(), 0, m.dpow);
            let x = Self::monomial(self.var, S::one(), m.varpow, 0);
            let sign = if m.dpow % 2 == 0 { c.clone() } else { -c.clone() };
            out = &out + &(&d * &x).scale(&sign);
        }
        out
    }

    /// Coefficient polynomials `p_0, ..., p_T` with `self = sum p_t D^t`.
    pub fn coefficient_form(&self) -> Vec<Poly<S>> {
        let Some(order) = self.d_order() else {
            return Vec::new();
        };
        let mut dense: Vec<Vec<S>> = vec![Vec::new(); order + 1];
        for (m, c) in &self.terms {
            let row = &mut dense[m.dpow];
            if row.len() <= m.varpow {
                row.resize(m.varpow + 1, S::zero());
            }
            row[m.varpow] = c.clone();
        }
        dense.into_iter().map(|c| Poly::new(self.var, c)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> WeylElement<T> {
        WeylElement::from_terms(self.var, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    pub fn to_complex(&self) -> WeylElement<GaussianRational> {
        self.map(Scalar::to_complex)
    }

    /// Same terms, relabelled to another variable.
    pub fn with_var(&self, var: Var) -> Self {
        WeylElement { var, terms: self.terms.clone() }
    }
}

impl WeylElement<GaussianRational> {
    pub fn is_real(&self) -> bool {
        self.terms.values().all(crate::exact::is_real)
    }

    pub fn to_real(&self) -> Result<WeylElement<Rational>> {
        if self.is_real() {
            Ok(self.map(|c| c.re.clone()))
        } else {
            Err(Error::NotReal)
        }
    }
}

forward_checked_binops!([S: Scalar] WeylElement<S>);

impl<S: Scalar> Neg for WeylElement<S> {
    type Output = WeylElement<S>;
    fn neg(self) -> Self {
        WeylElement { var: self.var, terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<S: Scalar> Neg for &WeylElement<S> {
    type Output = WeylElement<S>;
    fn neg(self) -> WeylElement<S> {
        -self.clone()
    }
}

/// `D^k` for the given variable.
pub fn d_pow<S: Scalar>(var: Var, k: usize) -> WeylElement<S> {
    WeylElement::monomial(var, S::one(), 0, k)
}

/// `var^n` as a multiplication operator.
pub fn var_pow<S: Scalar>(var: Var, n: usize) -> WeylElement<S> {
    WeylElement::monomial(var, S::one(), n, 0)
}
