//! Probabilists' Hermite polynomials, the divergence `delta f = x f - f'`,
//! Hermite-basis conversion and exact standard Gaussian moments.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Result;
use crate::exact::{double_factorial, Poly, Rational, Scalar, Var};

/// `delta f = x f - f'`, the adjoint of `d/dx` under the Gaussian measure.
pub fn delta<S: Scalar>(f: &Poly<S>) -> Result<Poly<S>> {
    f.var().expect(Var::X)?;
    Ok(&f.shift(1) - &f.derivative())
}

pub fn delta_iterated<S: Scalar>(f: &Poly<S>, times: usize) -> Result<Poly<S>> {
    (0..times).try_fold(f.clone(), |acc, _| delta(&acc))
}

/// `H_n = delta^n 1`.
pub fn hermite(n: usize) -> Poly<Rational> {
    delta_iterated(&Poly::one(Var::X), n).expect("variable is x")
}

/// The first `count` Hermite polynomials, built with one `delta` per step.
pub fn hermite_table(count: usize) -> Vec<Poly<Rational>> {
    let mut out = Vec::with_capacity(count);
    let mut h = Poly::one(Var::X);
    for _ in 0..count {
        let next = delta(&h).expect("variable is x");
        out.push(std::mem::replace(&mut h, next));
    }
    out
}

/// Coefficients of a polynomial in the Hermite basis; no zero entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HermiteCoefficients(BTreeMap<usize, Rational>);

impl HermiteCoefficients {
    pub fn get(&self, k: usize) -> Rational {
        self.0.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `sum c_k H_k` in the monomial basis.
    pub fn expand(&self) -> Poly<Rational> {
        let top = self.0.keys().next_back().map_or(0, |k| k + 1);
        let table = hermite_table(top);
        self.0
            .iter()
            .fold(Poly::zero(Var::X), |acc, (k, c)| &acc + &table[*k].scale(c))
    }
}

impl FromIterator<(usize, Rational)> for HermiteCoefficients {
    fn from_iter<I: IntoIterator<Item = (usize, Rational)>>(iter: I) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in iter {
            let entry = map.entry(k).or_insert_with(Rational::zero);
            *entry += c;
        }
        map.retain(|_, c: &mut Rational| !c.is_zero());
        HermiteCoefficients(map)
    }
}

/// Leading-term elimination against the monic, triangular Hermite family.
pub fn to_hermite(f: &Poly<Rational>) -> Result<HermiteCoefficients> {
    f.var().expect(Var::X)?;
    let Some(deg) = f.degree() else {
        return Ok(HermiteCoefficients::default());
    };
    let table = hermite_table(deg + 1);
    let mut rest = f.clone();
    let mut out = BTreeMap::new();
    while let Some(d) = rest.degree() {
        let c = rest.coeff(d);
        rest = &rest - &table[d].scale(&c);
        out.insert(d, c);
    }
    Ok(HermiteCoefficients(out))
}

/// `E[N^n]` for `N ~ N(0, 1)`: zero for odd `n`, `(n-1)!!` for even `n`.
pub fn gaussian_moment(n: usize) -> Rational {
    if n % 2 == 1 {
        Rational::zero()
    } else if n == 0 {
        Rational::from_integer(1.into())
    } else {
        Rational::from_integer(double_factorial(n - 1))
    }
}

/// Exact `E[f(N)]` for a rational polynomial `f`.
pub fn gaussian_expectation(f: &Poly<Rational>) -> Result<Rational> {
    f.var().expect(Var::X)?;
    Ok(f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(n, _)| n % 2 == 0)
        .fold(Rational::zero(), |acc, (n, c)| acc + c * gaussian_moment(n)))
}

/// Convenience: `E[f(N)]` for any scalar polynomial (complex coefficients
/// expected by linearity).
pub fn gaussian_expectation_scalar<S: Scalar>(f: &Poly<S>) -> Result<S> {
    f.var().expect(Var::X)?;
    Ok(f
        .coeffs()
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (n, c)| acc + c.clone() * S::from_rational(gaussian_moment(n))))
}
