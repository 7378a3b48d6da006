//! Polynomial numerics built on hyperbolic approximations.
//!
//! A polynomial `f` of degree `d` is replaced, on each disk of a covering
//! of the unit disk whose disks shrink toward the unit circle, by a local
//! polynomial of degree about `m`. That structure gives approximate
//! multipoint evaluation in quasi-linear time ([`eval`]), Kantorovich
//! certified root isolation over the whole projective line ([`roots`]),
//! and a geometric lower bound on the condition number ([`condition`]).
//!
//! Numerical code is generic over [`Real`]; the aliases below name the
//! instantiations used in practice.

pub mod certify;
pub mod complex_arith;
pub mod condition;
pub mod covering;
mod error;
pub mod eval;
pub mod happrox;
pub mod roots;
pub mod scalar;

pub use complex_arith::{Poly, PrecisionContext};
pub use error::{Error, Result};
pub use scalar::{Backend, BigFloat, DoubleDouble, Real, F128};

pub type Complex<T> = num_complex::Complex<T>;

pub type Poly64 = Poly<f64>;
pub type PolyDD = Poly<DoubleDouble>;
pub type PolyQuad = Poly<F128>;
pub type PolyBig = Poly<BigFloat>;
/// Exact rational coefficients, used by oracles.
pub type PolyQ = Poly<num_rational::BigRational>;

pub type C64 = Complex<f64>;
pub type CDD = Complex<DoubleDouble>;
pub type CQuad = Complex<F128>;
pub type CBig = Complex<BigFloat>;
