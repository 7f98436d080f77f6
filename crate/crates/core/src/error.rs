use thiserror::Error;

use crate::exact::Var;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable mismatch: {left} vs {right}")]
    VarMismatch { left: Var, right: Var },

    #[error("expected variable {expected}, found {found}")]
    WrongVariable { expected: Var, found: Var },

    #[error("division by zero")]
    DivisionByZero,

    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,

    #[error("coefficients are not real")]
    NotReal,

    #[error("no power of i makes the operator real")]
    NoRealUnit,

    #[error("operator is not in PSO(N); residual {residual}")]
    NotMember { residual: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate variance {0}")]
    DuplicateVariance(String),

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
