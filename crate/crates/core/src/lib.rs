//! Generalized Nevanlinna functions of class `N_κ`.
//!
//! The crate estimates the number of negative squares of the Nevanlinna
//! kernel, decides realizability and subclass membership, computes the
//! Krein–Langer factorization of scalar functions and builds finite
//! Pontryagin-space colligations whose impedance reproduces a given rational
//! function.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod classify;
pub mod colligation;
pub mod corpus;
pub mod error;
pub mod factorize;
pub mod indefinite;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod ratfun;
pub mod realize;
pub mod scalar;

pub use error::{Error, Result};
pub use indefinite::{Inertia, SignatureMetric};
pub use ratfun::{Builtin, ComplexPolynomial, LaurentExpansion, MatrixFunction, PoleTerm, RationalFunction};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexPolynomial64 = ComplexPolynomial<f64>;
pub type RationalFunction64 = RationalFunction<f64>;
pub type MatrixFunction64 = MatrixFunction<f64>;
pub type Colligation64 = colligation::Colligation<f64>;
pub type BlockSystem64 = colligation::BlockSystem<f64>;
pub type Factorization64 = factorize::Factorization<f64>;
