//! Euclidean arithmetic for differential operators with rational-function
//! coefficients in `t`, and joint annihilators built from least common left
//! multiples.
//!
//! Joint Stein operators come from the annihilator side: if `A_j`
//! annihilates the characteristic function of `X_j`, every left multiple of
//! all `A_j` annihilates each of them, and its inverse Fourier image is a
//! Stein operator for every `X_j` at once.

use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{forward_checked_binops, GaussianRational, Poly, Rational, RationalFunction, Scalar, Var};
use crate::fourier::{psi_inverse, real_up_to_unit};
use crate::weyl::{Monomial, WeylElement};

/// `sum_k c_k D^k` with `c_k` rational functions; no trailing zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrePoly<S> {
    var: Var,
    coeffs: Vec<RationalFunction<S>>,
}

impl<S: Scalar> OrePoly<S> {
    pub fn new(var: Var, mut coeffs: Vec<RationalFunction<S>>) -> Result<Self> {
        for c in &coeffs {
            var.check(c.var())?;
        }
        while coeffs.last().is_some_and(RationalFunction::is_zero) {
            coeffs.pop();
        }
        Ok(OrePoly { var, coeffs })
    }

    pub fn zero(var: Var) -> Self {
        OrePoly { var, coeffs: Vec::new() }
    }

    pub fn one(var: Var) -> Self {
        OrePoly { var, coeffs: vec![RationalFunction::one(var)] }
    }

    /// `c D^k`.
    pub fn monomial(c: RationalFunction<S>, k: usize) -> Self {
        let var = c.var();
        let mut coeffs = vec![RationalFunction::zero(var); k];
        coeffs.push(c);
        Self::new(var, coeffs).expect("single variable")
    }

    pub fn from_weyl(w: &WeylElement<S>) -> Self {
        let coeffs = w.coefficient_form().into_iter().map(RationalFunction::from_poly).collect();
        Self::new(w.var(), coeffs).expect("single variable")
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[RationalFunction<S>] {
        &self.coeffs
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&RationalFunction<S>> {
        self.coeffs.last()
    }

    fn coeff(&self, k: usize) -> RationalFunction<S> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| RationalFunction::zero(self.var))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        Self::new(self.var, coeffs)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    /// Left multiplication by a rational function.
    pub fn left_scale(&self, c: &RationalFunction<S>) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| c * a).collect()).expect("single variable")
    }

    /// `D * self`, using `D f = f D + f'`.
    pub fn d_times(&self) -> Self {
        let mut coeffs = vec![RationalFunction::zero(self.var); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k + 1] = &coeffs[k + 1] + c;
            coeffs[k] = &coeffs[k] + &c.derivative();
        }
        Self::new(self.var, coeffs).expect("single variable")
    }

    /// `[self, D self, D^2 self, ...]` up to `D^count-1 self`.
    fn d_shifts(&self, count: usize) -> Vec<Self> {
        let mut out: Vec<Self> = Vec::with_capacity(count);
        for i in 0..count {
            let next = if i == 0 { self.clone() } else { out[i - 1].d_times() };
            out.push(next);
        }
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.var.check(other.var)?;
        let shifts = other.d_shifts(self.coeffs.len());
        let mut out = Self::zero(self.var);
        for (a, shifted) in self.coeffs.iter().zip(&shifts) {
            if !a.is_zero() {
                out = &out + &shifted.left_scale(a);
            }
        }
        Ok(out)
    }

    /// `self = q * divisor + r` with `ord r < ord divisor`.
    pub fn right_divide(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.var.check(divisor.var)?;
        let dord = divisor.order().ok_or(Error::DivisionByZero)?;
        let lead = divisor.leading_coeff().expect("nonzero divisor");
        let qlen = self.coeffs.len().saturating_sub(dord);
        let shifts = divisor.d_shifts(qlen);
        let mut q = vec![RationalFunction::zero(self.var); qlen];
        let mut r = self.clone();
        while let Some(rord) = r.order() {
            if rord < dord {
                break;
            }
            let shift = rord - dord;
            let c = r.coeffs[rord].checked_div(lead)?;
            r = &r - &shifts[shift].left_scale(&c);
            debug_assert!(r.order().map_or(true, |o| o < rord));
            q[shift] = c;
        }
        Ok((Self::new(self.var, q)?, r))
    }

    /// Left-multiplies by the inverse of the leading coefficient.
    pub fn make_monic(&self) -> Self {
        match self.leading_coeff() {
            Some(lead) => self.left_scale(&lead.inv().expect("leading coefficient is nonzero")),
            None => self.clone(),
        }
    }

    /// Clears denominators and content to land in the polynomial-coefficient
    /// Weyl algebra, in a canonical representative: coefficient polynomials
    /// have no common factor, scalar parts are coprime integers, and the
    /// leading scalar (top `D` power, top variable power) is positive.
    pub fn to_weyl(&self) -> WeylElement<S> {
        if self.is_zero() {
            return WeylElement::zero(self.var);
        }
        let var = self.var;
        let den_lcm = self
            .coeffs
            .iter()
            .fold(Poly::one(var), |acc, c| poly_lcm(&acc, c.den()));
        let mut polys: Vec<Poly<S>> = self
            .coeffs
            .iter()
            .map(|c| &c.num().clone() * &den_lcm.exact_div(c.den()).expect("lcm is a multiple"))
            .collect();
        let content = polys
            .iter()
            .filter(|p| !p.is_zero())
            .try_fold(Poly::zero(var), |acc, p| acc.gcd(p))
            .expect("at least one nonzero coefficient");
        polys = polys.iter().map(|p| p.exact_div(&content).expect("content divides")).collect();

        let lead = polys.last().and_then(|p| p.leading_coeff()).cloned().expect("nonzero leading coefficient");
        let lead_inv = lead.inv().expect("nonzero");
        polys = polys.iter().map(|p| p.scale(&lead_inv)).collect();
        fn scalars<S: Scalar>(polys: &[Poly<S>]) -> impl Iterator<Item = &S> {
            polys.iter().flat_map(|p| p.coeffs().iter()).filter(|c| !c.is_zero())
        }
        let den = scalars(&polys).fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator_lcm()));
        let den = S::from_integer(den);
        polys = polys.iter().map(|p| p.scale(&den)).collect();
        let num_gcd = scalars(&polys).fold(BigInt::zero(), |acc, c| acc.gcd(&c.numerator_gcd()));
        if !num_gcd.is_zero() && !num_gcd.is_one() {
            let inv = S::from_rational(Rational::new(BigInt::one(), num_gcd.abs()));
            polys = polys.iter().map(|p| p.scale(&inv)).collect();
        }
        WeylElement::from_coefficient_form(var, &polys).expect("single variable")
    }
}

fn poly_lcm<S: Scalar>(a: &Poly<S>, b: &Poly<S>) -> Poly<S> {
    let g = a.gcd(b).expect("denominators are nonzero");
    (a * &b.exact_div(&g).expect("gcd divides")).monic()
}

forward_checked_binops!([S: Scalar] OrePoly<S>);

impl<S: Scalar> Neg for OrePoly<S> {
    type Output = OrePoly<S>;
    fn neg(self) -> Self {
        OrePoly { var: self.var, coeffs: self.coeffs.into_iter().map(Neg::neg).collect() }
    }
}

impl<S: Scalar> Neg for &OrePoly<S> {
    type Output = OrePoly<S>;
    fn neg(self) -> OrePoly<S> {
        -self.clone()
    }
}

/// Monic greatest common right divisor by the Euclidean remainder sequence.
pub fn gcrd<S: Scalar>(a: &OrePoly<S>, b: &OrePoly<S>) -> Result<OrePoly<S>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidParameter("gcrd of a zero operator".into()));
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.right_divide(&b)?;
        a = b;
        b = r;
    }
    Ok(a.make_monic())
}

/// Least common left multiple, found as the first order `N` at which the
/// shifted operators `D^j a` (`j <= N - ord a`) and `D^j b` (`j <= N - ord b`)
/// become linearly dependent over the rational functions. The result is
/// monic; right divisibility by both inputs is checked before returning.
pub fn lclm<S: Scalar>(a: &OrePoly<S>, b: &OrePoly<S>) -> Result<OrePoly<S>> {
    a.var.check(b.var)?;
    let (p, q) = match (a.order(), b.order()) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(Error::InvalidParameter("lclm of a zero operator".into())),
    };
    let a_shifts = a.d_shifts(q + 1);
    let b_shifts = b.d_shifts(p + 1);
    for n in p.max(q)..=p + q {
        let rows: Vec<&OrePoly<S>> = a_shifts[..=n - p].iter().chain(&b_shifts[..=n - q]).collect();
        let Some(kernel) = left_kernel_vector(&rows, n + 1, a.var)? else {
            continue;
        };
        let l = a_shifts[..=n - p]
            .iter()
            .zip(&kernel)
            .fold(OrePoly::zero(a.var), |acc, (s, c)| &acc + &s.left_scale(c));
        if l.is_zero() {
            continue;
        }
        let l = l.make_monic();
        for divisor in [a, b] {
            if !l.right_divide(divisor)?.1.is_zero() {
                return Err(Error::Postcondition("lclm is not right-divisible by its inputs".into()));
            }
        }
        return Ok(l);
    }
    Err(Error::Postcondition("no common left multiple up to order ord(a) + ord(b)".into()))
}

/// A nonzero vector `lambda` with `sum_r lambda_r rows[r] = 0`, if any,
/// by Gauss-Jordan elimination over the rational functions.
fn left_kernel_vector<S: Scalar>(
    rows: &[&OrePoly<S>],
    width: usize,
    var: Var,
) -> Result<Option<Vec<RationalFunction<S>>>> {
    let unknowns = rows.len();
    // Equations: one per D-power, unknowns are the row weights.
    let mut m: Vec<Vec<RationalFunction<S>>> =
        (0..width).map(|col| rows.iter().map(|r| r.coeff(col)).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..unknowns {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].inv()?;
        m[row] = m[row].iter().map(|e| e * &inv).collect();
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (e, p) in m[r].iter_mut().zip(&pivot_row) {
                    *e = &*e - &(&factor * p);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let Some(free) = (0..unknowns).find(|c| !pivots.contains(c)) else {
        return Ok(None);
    };
    let mut out = vec![RationalFunction::zero(var); unknowns];
    out[free] = RationalFunction::one(var);
    for (r, &pc) in pivots.iter().enumerate() {
        out[pc] = -&m[r][free];
    }
    Ok(Some(out))
}

/// Canonical polynomial-coefficient representative of `w` up to a left
/// rational-function unit.
pub fn canonical<S: Scalar>(w: &WeylElement<S>) -> WeylElement<S> {
    OrePoly::from_weyl(w).to_weyl()
}

/// [`lclm`] on polynomial-coefficient operators, returned in canonical form.
pub fn lclm_weyl<S: Scalar>(a: &WeylElement<S>, b: &WeylElement<S>) -> Result<WeylElement<S>> {
    Ok(lclm(&OrePoly::from_weyl(a), &OrePoly::from_weyl(b))?.to_weyl())
}

/// [`gcrd`] on polynomial-coefficient operators, returned in canonical form.
pub fn gcrd_weyl<S: Scalar>(a: &WeylElement<S>, b: &WeylElement<S>) -> Result<WeylElement<S>> {
    Ok(gcrd(&OrePoly::from_weyl(a), &OrePoly::from_weyl(b))?.to_weyl())
}

/// Variances of a centred Gaussian mixture, with the weights kept only for
/// verification: the joint operator never reads them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureSpec {
    variances: Vec<Rational>,
    weights: Vec<Rational>,
}

impl MixtureSpec {
    pub fn new(variances: Vec<Rational>, weights: Vec<Rational>) -> Result<Self> {
        if variances.is_empty() {
            return Err(Error::InvalidParameter("at least one variance is required".into()));
        }
        if variances.len() != weights.len() {
            return Err(Error::InvalidParameter("one weight per variance is required".into()));
        }
        for (i, v) in variances.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::InvalidParameter(format!("variance {v} must be positive")));
            }
            if variances[..i].contains(v) {
                return Err(Error::DuplicateVariance(v.to_string()));
            }
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidParameter("weights must be positive".into()));
        }
        if weights.iter().fold(Rational::zero(), |acc, w| acc + w) != Rational::one() {
            return Err(Error::InvalidParameter("weights must sum to 1".into()));
        }
        Ok(MixtureSpec { variances, weights })
    }

    pub fn with_equal_weights(variances: Vec<Rational>) -> Result<Self> {
        let n = variances.len().max(1);
        let w = Rational::new(BigInt::one(), BigInt::from(n));
        Self::new(variances, vec![w; n])
    }

    pub fn variances(&self) -> &[Rational] {
        &self.variances
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }
}

type C = GaussianRational;

/// `D + sigma2 t`, annihilating `exp(-sigma2 t^2 / 2)`.
pub fn centred_gaussian_annihilator(sigma2: &Rational) -> WeylElement<C> {
    WeylElement::from_terms(
        Var::T,
        [(Monomial::new(0, 1), C::one()), (Monomial::new(1, 0), C::from_rational(sigma2.clone()))],
    )
}

/// Canonical lclm of several annihilators.
pub fn joint_annihilator(ops: &[WeylElement<C>]) -> Result<WeylElement<C>> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("at least one operator is required".into()))?;
    let mut acc = OrePoly::from_weyl(first);
    for op in rest {
        acc = lclm(&acc, &OrePoly::from_weyl(op))?;
    }
    Ok(acc.to_weyl())
}

/// Annihilator of every component characteristic function of the mixture.
pub fn mixture_annihilator(spec: &MixtureSpec) -> Result<WeylElement<C>> {
    let ops: Vec<_> = spec.variances.iter().map(centred_gaussian_annihilator).collect();
    joint_annihilator(&ops)
}

/// Inverse Fourier image of an annihilator, made real by a power of `i`.
pub fn stein_from_annihilator(a: &WeylElement<C>) -> Result<WeylElement<Rational>> {
    Ok(real_up_to_unit(&psi_inverse(a)?)?.1)
}

pub fn mixture_stein_operator(spec: &MixtureSpec) -> Result<WeylElement<Rational>> {
    stein_from_annihilator(&mixture_annihilator(spec)?)
}

/// `t D^2 + 3 D + r^2 t`, annihilating `2 J_1(r t) / (r t)`, the
/// characteristic function of the semicircle law on `[-r, r]`.
pub fn semicircle_annihilator(radius: &Rational) -> WeylElement<C> {
    WeylElement::from_terms(
        Var::T,
        [
            (Monomial::new(1, 2), C::one()),
            (Monomial::new(0, 1), C::from_integer(3)),
            (Monomial::new(1, 0), C::from_rational(radius * radius)),
        ],
    )
}

/// A nonzero operator in both `PSO(N)` and the Stein class of the law whose
/// characteristic function `other` annihilates.
pub fn intersection_operator(other: &WeylElement<C>) -> Result<WeylElement<Rational>> {
    if other.is_zero() {
        return Err(Error::InvalidParameter("operator must be nonzero".into()));
    }
    let joint = joint_annihilator(&[centred_gaussian_annihilator(&Rational::one()), other.clone()])?;
    stein_from_annihilator(&joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::fourier::{annihilates, CfFamily};
    use crate::pso::{is_member, stein_generator};

    type R = RationalFunction<C>;

    fn re(n: i64) -> C {
        C::from_rational(int(n))
    }
    fn poly(coeffs: &[i64]) -> Poly<C> {
        Poly::new(Var::T, coeffs.iter().map(|&c| re(c)).collect())
    }
    fn rf(num: &[i64], den: &[i64]) -> R {
        R::new(poly(num), poly(den)).unwrap()
    }
    fn ore(coeffs: &[R]) -> OrePoly<C> {
        OrePoly::new(Var::T, coeffs.to_vec()).unwrap()
    }
    fn d() -> OrePoly<C> {
        ore(&[rf(&[0], &[1]), rf(&[1], &[1])])
    }
    fn d_plus(sigma2: i64) -> OrePoly<C> {
        ore(&[rf(&[0, sigma2], &[1]), rf(&[1], &[1])])
    }
    fn example_c() -> WeylElement<C> {
        WeylElement::from_terms(
            Var::T,
            [
                (Monomial::new(1, 2), re(1)),
                (Monomial::new(2, 1), re(3)),
                (Monomial::new(0, 1), re(-1)),
                (Monomial::new(3, 0), re(2)),
            ],
        )
    }

    #[test]
    fn mul_examples() {
        let inv_t = OrePoly::monomial(rf(&[1], &[0, 1]), 0);
        assert_eq!(&d() * &inv_t, ore(&[rf(&[-1], &[0, 0, 1]), rf(&[1], &[0, 1])]));
        let prod = &d_plus(1) * &d_plus(2);
        assert_eq!(prod, ore(&[rf(&[2, 0, 2], &[1]), rf(&[0, 3], &[1]), rf(&[1], &[1])]));
        assert_eq!(&d_plus(1) * &OrePoly::one(Var::T), d_plus(1));
    }

    #[test]
    fn right_divide_examples() {
        let (q, r) = (&d() * &d()).right_divide(&d()).unwrap();
        assert_eq!(q, d());
        assert!(r.is_zero());

        let prod = &d_plus(1) * &d_plus(2);
        let (q, r) = prod.right_divide(&d_plus(2)).unwrap();
        assert_eq!(q, d_plus(1));
        assert!(r.is_zero());
        // (D + 2t)(D + t) differs from the product by 1.
        let (q, r) = prod.right_divide(&d_plus(1)).unwrap();
        assert_eq!(q, d_plus(2));
        assert_eq!(r, OrePoly::one(Var::T));

        let (q, r) = d_plus(1).right_divide(&d_plus(2)).unwrap();
        assert_eq!(q, OrePoly::one(Var::T));
        assert_eq!(r, ore(&[rf(&[0, -1], &[1])]));

        assert_eq!(d().right_divide(&OrePoly::zero(Var::T)), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcrd_and_lclm_examples() {
        assert_eq!(gcrd(&d_plus(1), &d_plus(2)).unwrap(), OrePoly::one(Var::T));
        let l = lclm(&d_plus(1), &d_plus(2)).unwrap();
        assert_eq!(l.to_weyl(), example_c());
        assert_eq!(lclm(&d_plus(3), &d_plus(3)).unwrap(), d_plus(3));
        assert!(lclm(&d(), &OrePoly::zero(Var::T)).is_err());
    }

    #[test]
    fn canonical_form_clears_denominators_and_content() {
        // (1/2)(t^2 + t) D + (t + 1)/3  ->  3 t D + 2
        let w = ore(&[rf(&[1, 1], &[3]), rf(&[0, 1, 1], &[2])]).to_weyl();
        let want = WeylElement::from_terms(Var::T, [(Monomial::new(1, 1), re(3)), (Monomial::new(0, 0), re(2))]);
        assert_eq!(w, want);
        assert_eq!(canonical(&want.scale(&C::from_rational(rat(-7, 5)))), want);
    }

    #[test]
    fn mixture_examples() {
        let one = MixtureSpec::with_equal_weights(vec![int(1)]).unwrap();
        assert_eq!(mixture_annihilator(&one).unwrap(), centred_gaussian_annihilator(&int(1)));
        assert_eq!(mixture_stein_operator(&one).unwrap(), stein_generator());

        let two = MixtureSpec::with_equal_weights(vec![int(1), int(2)]).unwrap();
        let ann = mixture_annihilator(&two).unwrap();
        assert_eq!(ann, example_c());
        for s2 in [1, 2] {
            assert!(annihilates(&ann, &CfFamily::new(int(s2), int(0)).unwrap()).unwrap());
        }
        let s = mixture_stein_operator(&two).unwrap();
        let want = WeylElement::from_terms(
            Var::X,
            [
                (Monomial::new(0, 3), int(2)),
                (Monomial::new(1, 2), int(-3)),
                (Monomial::new(2, 1), int(1)),
                (Monomial::new(1, 0), int(-1)),
            ],
        );
        assert_eq!(s, want);
        assert!(is_member(&s).unwrap().is_member);

        let three = MixtureSpec::with_equal_weights(vec![int(1), int(2), int(3)]).unwrap();
        let ann = mixture_annihilator(&three).unwrap();
        assert_eq!(ann.d_order(), Some(3));
        for s2 in [1, 2, 3] {
            assert!(annihilates(&ann, &CfFamily::new(int(s2), int(0)).unwrap()).unwrap());
        }
    }

    #[test]
    fn mixture_spec_validation() {
        assert!(matches!(
            MixtureSpec::with_equal_weights(vec![int(1), int(1)]),
            Err(Error::DuplicateVariance(_))
        ));
        assert!(MixtureSpec::new(vec![int(1), int(2)], vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(MixtureSpec::new(vec![int(-1)], vec![int(1)]).is_err());
        assert!(MixtureSpec::new(vec![], vec![]).is_err());
    }

    #[test]
    fn semicircle_stein_operator() {
        // psi^{-1}(t D^2 + 3 D + t) = i (x^2 D - D + 3 x)
        let s = stein_from_annihilator(&semicircle_annihilator(&int(1))).unwrap();
        let want = WeylElement::from_terms(
            Var::X,
            [(Monomial::new(2, 1), int(1)), (Monomial::new(0, 1), int(-1)), (Monomial::new(1, 0), int(3))],
        );
        assert_eq!(s, want);
    }

    #[test]
    fn intersection_examples() {
        let joint = intersection_operator(&semicircle_annihilator(&int(1))).unwrap();
        assert!(is_member(&joint).unwrap().is_member);
        let self_joint = intersection_operator(&centred_gaussian_annihilator(&int(1))).unwrap();
        assert_eq!(self_joint, stein_generator());
        assert!(intersection_operator(&WeylElement::zero(Var::T)).is_err());
    }
}
