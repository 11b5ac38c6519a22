//! Arithmetic over GF(2^e) and univariate polynomials over it.

mod field;
mod poly;

pub use field::{
    default_reduction_polynomial, extension_degree_for, Field, FieldElement, FieldOp,
    MAX_EXTENSION_DEGREE, MIN_EXTENSION_DEGREE,
};
pub use poly::{
    extended_euclid, lagrange_interpolate, poly_from_roots, poly_gcd, sample_rootless_poly,
    EuclidRow, EuclidRows, Poly,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} outside the supported range 2..=16")]
    UnsupportedDegree(u8),
    #[error("reduction polynomial {modulus:#x} is not primitive of degree {e}")]
    BadModulus { e: u8, modulus: u32 },
    #[error("value {value} outside a field of order {order}")]
    OutOfRange { value: u32, order: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(FieldElement),
    #[error("interpolation needs at least one point")]
    EmptyInterpolation,
    #[error("extended Euclid called with two zero polynomials")]
    BothZero,
    #[error("no polynomial of degree {0} is rootless")]
    NoRootlessPolynomial(usize),
}
