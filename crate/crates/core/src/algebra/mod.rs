//! Exact arithmetic over `F_{p^m}`: field elements, polynomials, matrices.

mod field;
mod matrix;
mod poly;

pub use field::{prime_power, Elem, FiniteField, MAX_ORDER};
pub(crate) use matrix::axpy_sub;
pub use matrix::Matrix;
pub use poly::Poly;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("duplicate interpolation node {0}")]
    DuplicateNode(Elem),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus {0:?} is reducible")]
    Reducible(Vec<u32>),
    #[error("field of order {0} exceeds the supported size")]
    FieldTooLarge(u64),
    #[error("element {0} is outside the field")]
    InvalidElement(Elem),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}
