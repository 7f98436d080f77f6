//! Growth of the solutions of `S_m phi = 0`, where `S_m` is the order-`m`
//! Rodriguez annihilator of the standard Gaussian.
//!
//! For large `x` the WKB solutions of the order-`m` equation behave like
//! `exp(-omega^(j-1) x^2 / 2)` with `omega = exp(2 pi i / m)` and `j = 1..m`.
//! The branch `j = 1` is the Gaussian itself. If every other branch blows
//! up, boundedness alone picks out the Gaussian.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Behaviour {
    Decaying,
    BlowingUp,
    Oscillatory,
}

impl Behaviour {
    pub fn name(self) -> &'static str {
        match self {
            Behaviour::Decaying => "decaying",
            Behaviour::BlowingUp => "blowing-up",
            Behaviour::Oscillatory => "oscillatory",
        }
    }
}

impl fmt::Display for Behaviour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One WKB branch `exp(c x^2)` with `c = -omega^(j-1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub j: usize,
    /// Real and imaginary parts of `c`.
    pub exponent: (f64, f64),
    /// `Re c` and `Im c` when they are rational.
    pub exact_re: Option<Rational>,
    pub exact_im: Option<Rational>,
    pub behaviour: Behaviour,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub m: usize,
    pub branches: Vec<Branch>,
    /// All branches with `j >= 2` blow up.
    pub characterising: bool,
}

impl ClassificationReport {
    /// `sum_j c_j`, which vanishes for `m >= 2`.
    pub fn exponent_sum(&self) -> (f64, f64) {
        self.branches
            .iter()
            .fold((0.0, 0.0), |(re, im), b| (re + b.exponent.0, im + b.exponent.1))
    }
}

/// `cos(2 pi num/den)` when it is rational.
fn exact_cos_turn(num: i64, den: i64) -> Option<Rational> {
    let g = num.gcd(&den);
    let (num, den) = (num / g, den / g);
    let num = num.rem_euclid(den);
    match (den, num) {
        (1, _) => Some(rat(1, 1)),
        (2, _) => Some(rat(-1, 1)),
        (3, _) => Some(rat(-1, 2)),
        (4, _) => Some(rat(0, 1)),
        (6, _) => Some(rat(1, 2)),
        _ => None,
    }
}

/// `sin(2 pi num/den) = cos(2 pi (4 num - den) / (4 den))`.
fn exact_sin_turn(num: i64, den: i64) -> Option<Rational> {
    exact_cos_turn(4 * num - den, 4 * den)
}

/// Branch table for order `m >= 1`.
pub fn classify(m: usize) -> Result<ClassificationReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("order m must be at least 1".into()));
    }
    let branches: Vec<Branch> = (1..=m)
        .map(|j| {
            let turn = (j - 1) as i64;
            let angle = 2.0 * std::f64::consts::PI * turn as f64 / m as f64;
            let (s, c) = angle.sin_cos();
            let half = rat(-1, 2);
            let exact_re = exact_cos_turn(turn, m as i64).map(|v| &half * v);
            let exact_im = exact_sin_turn(turn, m as i64).map(|v| &half * v);
            // Re c = 0 exactly when 4(j-1)/m is an odd integer.
            let on_axis = (4 * turn) % m as i64 == 0 && ((4 * turn) / m as i64) % 2 == 1;
            let behaviour = if on_axis {
                Behaviour::Oscillatory
            } else if c > 0.0 {
                Behaviour::Decaying
            } else {
                Behaviour::BlowingUp
            };
            let re = if on_axis { 0.0 } else { -c / 2.0 };
            let im = match &exact_im {
                Some(v) if v.is_zero() => 0.0,
                _ => -s / 2.0,
            };
            Branch { j, exponent: (re, im), exact_re, exact_im, behaviour }
        })
        .collect();
    let characterising = branches.iter().skip(1).all(|b| b.behaviour == Behaviour::BlowingUp);
    Ok(ClassificationReport { m, branches, characterising })
}

/// Reports for `m = 1..=m_max`.
pub fn table(m_max: usize) -> Result<Vec<ClassificationReport>> {
    (1..=m_max).map(classify).collect()
}
