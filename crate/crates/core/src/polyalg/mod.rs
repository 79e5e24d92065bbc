//! Sparse multivariate polynomials with signed exponents.
//!
//! Laurent polynomials share [`Polynomial`] with ordinary ones; an exponent
//! vector may carry negative entries. Only [`Polynomial::laurent_clear`] and
//! [`Polynomial::clear_to_orthant`] map into the nonnegative world, and every
//! order-dependent routine (division, Gröbner bases) rejects Laurent input.

mod division;
mod monomial;
mod order;
mod polynomial;
mod text;

pub use division::multivariate_divide;
pub(crate) use division::OrderedPoly;
pub use monomial::ExponentVector;
pub use order::{MonomialOrder, OrderKind};
pub use polynomial::{poly_arith, PolyOp, Polynomial};
pub use text::parse_polynomial;
