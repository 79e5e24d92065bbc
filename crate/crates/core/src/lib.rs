//! Maximum-entropy and minimum I-divergence estimation over finite sample
//! spaces, posed as systems of (Laurent) polynomial equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`numkernel`]: exact rationals and dyadic intervals.
//! - [`polyalg`]: sparse multivariate (Laurent) polynomials, monomial orders,
//!   multivariate division.
//! - [`groebner`]: Buchberger's algorithm, elimination, Sturm root isolation and
//!   positive-orthant solving of zero-dimensional systems.
//! - [`maxent`]: problem model, the polynomial-system builders, entropy and
//!   divergence functionals, toric ideals and toric membership.
//! - [`kc`]: the Kullback-Csiszár cyclic I-projection iteration.
//! - [`numbaseline`]: Newton on the convex dual and generalized iterative
//!   scaling, used as numeric cross-checks.
//!
//! Algebraic code is generic over a [`Coefficient`] field (exact [`Rational`]
//! or floating point) and numeric code over a [`Real`] float (`f32` / `f64`).

pub mod error;
pub mod groebner;
pub mod kc;
mod linalg;
pub mod maxent;
pub mod numbaseline;
pub mod numkernel;
pub mod polyalg;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{Coefficient, Real};

pub use groebner::{
    buchberger, eliminate, s_polynomial, solve_positive, sturm_isolate, GroebnerBasis,
    IsolatingInterval, PositiveSolution, RootDomain,
};
pub use maxent::{
    entropy, estimate, kl_divergence, parametrize, residuals, sample_sums, Distribution,
    MaxEntProblem, Method, PolySystem, Solution, ToricSpec,
};
pub use numkernel::{DyadicInterval, Rational};
pub use polyalg::{ExponentVector, MonomialOrder, OrderKind, Polynomial};

/// Polynomials with exact rational coefficients.
pub type QPolynomial = Polynomial<Rational>;
/// Polynomials with `f64` coefficients, used for numeric back-substitution.
pub type FPolynomial = Polynomial<f64>;
/// Double-precision distribution.
pub type Distribution64 = Distribution<f64>;
/// Single-precision distribution.
pub type Distribution32 = Distribution<f32>;
