//! Exact arithmetic for polynomial Stein operators of the standard Gaussian
//! law, viewed as elements of the first Weyl algebra.
//!
//! Operators are written in normal order `sum c x^n D^k`. The Stein
//! operators of `N(0, 1)` form the right ideal generated by `D - x`; the
//! [`pso`] module decides membership and decomposes members in the Hermite
//! basis. [`fourier`] moves operators to the characteristic-function side,
//! where [`ore`] computes least common left multiples, which gives Stein
//! operators for mixtures and intersections of laws.

pub mod classify;
pub mod error;
pub mod exact;
pub mod fourier;
pub mod hermite;
pub mod ore;
pub mod pso;
pub mod syntax;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use exact::{GaussianRational, Poly, Rational, RationalFunction, Scalar, Var};
pub use ore::OrePoly;
pub use syntax::{parse, parse_t, parse_x, ParseError};
pub use verify::DistributionSpec;
pub use weyl::{Monomial, WeylElement};
