//! Exact scalars, dense univariate polynomials and rational functions.
//!
//! Everything here is immutable after construction and canonical: two values
//! that are mathematically equal have identical field contents, so `==` is
//! structural equality.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type GaussianRational = Complex<Rational>;

/// The indeterminate a polynomial or operator is written in.
///
/// `X` is the "space" side (Stein operators), `T` the "frequency" side
/// (annihilators of characteristic functions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
        }
    }

    pub(crate) fn check(self, other: Var) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VarMismatch { left: self, right: other })
        }
    }

    pub(crate) fn expect(self, expected: Var) -> Result<()> {
        if self == expected {
            Ok(())
        } else {
            Err(Error::WrongVariable { expected, found: self })
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coefficient field: either [`Rational`] or [`GaussianRational`].
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: Rational) -> Self;

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn to_complex(&self) -> GaussianRational;

    /// Least common multiple of the denominators of all rational parts.
    fn denominator_lcm(&self) -> BigInt;

    /// Gcd of the numerators of all rational parts (zero for zero).
    fn numerator_gcd(&self) -> BigInt;

    fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }
}

impl Scalar for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn to_complex(&self) -> GaussianRational {
        Complex::new(self.clone(), Rational::zero())
    }

    fn denominator_lcm(&self) -> BigInt {
        self.denom().clone()
    }

    fn numerator_gcd(&self) -> BigInt {
        self.numer().abs()
    }
}

impl Scalar for GaussianRational {
    fn from_rational(r: Rational) -> Self {
        Complex::new(r, Rational::zero())
    }

    fn inv(&self) -> Option<Self> {
        let norm = self.norm_sqr();
        if norm.is_zero() {
            None
        } else {
            Some(Complex::new(&self.re / &norm, -&self.im / &norm))
        }
    }

    fn to_complex(&self) -> GaussianRational {
        self.clone()
    }

    fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    fn numerator_gcd(&self) -> BigInt {
        self.re.numer().gcd(self.im.numer())
    }
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn gauss(re: Rational, im: Rational) -> GaussianRational {
    Complex::new(re, im)
}

/// The imaginary unit `i`.
pub fn imag() -> GaussianRational {
    Complex::new(Rational::zero(), Rational::one())
}

/// `i^k` for any integer `k`.
pub fn imag_pow(k: i64) -> GaussianRational {
    match k.rem_euclid(4) {
        0 => GaussianRational::one(),
        1 => imag(),
        2 => -GaussianRational::one(),
        _ => -imag(),
    }
}

pub fn is_real(z: &GaussianRational) -> bool {
    z.im.is_zero()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `m (m-1) ... (m-r+1)`.
pub fn falling_factorial(m: usize, r: usize) -> BigInt {
    if r > m {
        return BigInt::zero();
    }
    ((m - r + 1)..=m).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    falling_factorial(n, r) / factorial(r)
}

/// `(n-1)!!` style double factorial `n (n-2) (n-4) ...`; `double_factorial(0) = 1`.
pub fn double_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// Dense univariate polynomial, coefficients in ascending degree order.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector and [`Poly::degree`] returns `None` for it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<S> {
    var: Var,
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(var: Var, mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        Poly { var, coeffs: Vec::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, S::one())
    }

    pub fn constant(var: Var, c: S) -> Self {
        Self::new(var, vec![c])
    }

    pub fn monomial(var: Var, c: S, degree: usize) -> Self {
        let mut coeffs = vec![S::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(var, coeffs)
    }

    /// The polynomial `var` itself.
    pub fn identity(var: Var) -> Self {
        Self::monomial(var, S::one(), 1)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> S {
        self.coeffs.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect();
        Ok(Self::new(self.var, coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) - other.coeff(n)).collect();
        Ok(Self::new(self.var, coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.var));
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Self::new(self.var, coeffs))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(self.var), |acc, _| &acc * self)
    }

    /// Multiply by `var^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![S::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(self.var, coeffs)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c.clone() * S::from_integer(n))
            .collect();
        Self::new(self.var, coeffs)
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        if k >= self.coeffs.len() {
            return Self::zero(self.var);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(n, c)| c.clone() * S::from_integer(falling_factorial(n, k)))
            .collect();
        Self::new(self.var, coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, at: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * at.clone() + c.clone())
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.var.check(divisor.var)?;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.coeffs[dd].inv().ok_or(Error::DivisionByZero)?;
        let mut rem = self.coeffs.clone();
        let qlen = (self.coeffs.len()).saturating_sub(dd);
        let mut quot = vec![S::zero(); qlen];
        for shift in (0..qlen).rev() {
            let c = rem[shift + dd].clone() * lead_inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = rem[shift + j].clone() - c.clone() * d.clone();
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(self.var, quot), Self::new(self.var, rem)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Postcondition("polynomial division is not exact".into()))
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading_coeff().and_then(Scalar::inv) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor by the classical Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r.monic();
        }
        Ok(a.monic())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.var, self.coeffs.iter().map(f).collect())
    }

    pub fn to_complex(&self) -> Poly<GaussianRational> {
        self.map(Scalar::to_complex)
    }

    pub fn with_var(&self, var: Var) -> Self {
        Poly { var, coeffs: self.coeffs.clone() }
    }
}

impl Poly<Rational> {
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl Poly<GaussianRational> {
    /// Real part polynomial if every coefficient is real.
    pub fn to_real(&self) -> Result<Poly<Rational>> {
        if self.coeffs.iter().all(is_real) {
            Ok(self.map(|c| c.re.clone()))
        } else {
            Err(Error::NotReal)
        }
    }
}

/// Implements the std binary operators for a type with `checked_*` methods.
/// The operators panic on variable mismatch; use the `checked_*` forms for
/// fallible arithmetic.
macro_rules! forward_checked_binops {
    ([$($gen:tt)*] $ty:ty) => {
        forward_checked_binops!(@one [$($gen)*] $ty, Add, add, checked_add);
        forward_checked_binops!(@one [$($gen)*] $ty, Sub, sub, checked_sub);
        forward_checked_binops!(@one [$($gen)*] $ty, Mul, mul, checked_mul);
    };
    (@one [$($gen:tt)*] $ty:ty, $tr:ident, $m:ident, $checked:ident) => {
        impl<'a, $($gen)*> std::ops::$tr<&'a $ty> for &'a $ty {
            type Output = $ty;
            fn $m(self, rhs: &'a $ty) -> $ty {
                self.$checked(rhs).expect(concat!("operands of ", stringify!($m), " must share a variable"))
            }
        }
        impl<$($gen)*> std::ops::$tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl<'a, $($gen)*> std::ops::$tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &'a $ty) -> $ty {
                std::ops::$tr::$m(&self, rhs)
            }
        }
    };
}
pub(crate) use forward_checked_binops;

forward_checked_binops!([S: Scalar] Poly<S>);

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly { var: self.var, coeffs: self.coeffs.into_iter().map(Neg::neg).collect() }
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -self.clone()
    }
}

/// Reduced quotient `num / den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction<S> {
    num: Poly<S>,
    den: Poly<S>,
}

impl<S: Scalar> RationalFunction<S> {
    pub fn new(num: Poly<S>, den: Poly<S>) -> Result<Self> {
        num.var.check(den.var)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let var = num.var;
        if num.is_zero() {
            return Ok(Self::zero(var));
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        let lead_inv = den.leading_coeff().and_then(Scalar::inv).ok_or(Error::DivisionByZero)?;
        Ok(RationalFunction { num: num.scale(&lead_inv), den: den.scale(&lead_inv) })
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        let den = Poly::one(p.var);
        RationalFunction { num: p, den }
    }

    pub fn constant(var: Var, c: S) -> Self {
        Self::from_poly(Poly::constant(var, c))
    }

    pub fn zero(var: Var) -> Self {
        Self::from_poly(Poly::zero(var))
    }

    pub fn one(var: Var) -> Self {
        Self::from_poly(Poly::one(var))
    }

    pub fn var(&self) -> Var {
        self.num.var
    }

    pub fn num(&self) -> &Poly<S> {
        &self.num
    }

    pub fn den(&self) -> &Poly<S> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.var().check(other.var())?;
        if self.den == other.den {
            return Self::new(self.num.checked_add(&other.num)?, self.den.clone());
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.var().check(other.var())?;
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.var().check(other.var())?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("denominator is nonzero")
    }

    /// `(n'd - nd') / d^2`.
    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(num, &self.den * &self.den).expect("denominator is nonzero")
    }
}

forward_checked_binops!([S: Scalar] RationalFunction<S>);

impl<S: Scalar> Neg for RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn neg(self) -> Self {
        RationalFunction { num: -self.num, den: self.den }
    }
}

impl<S: Scalar> Neg for &RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn neg(self) -> RationalFunction<S> {
        -self.clone()
    }
}
