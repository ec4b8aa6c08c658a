//! Complex polynomials, rational functions and the matrix functions the rest
//! of the crate operates on.

mod function;
mod json;
mod poly;
mod rational;

pub use function::{sqrt_z2_minus_1, Builtin, LaurentExpansion, MatrixFunction, PoleTerm, RationalMatrix};
pub use json::{EntrySpec, FunctionFile, FunctionSpec};
pub use poly::ComplexPolynomial;
pub use rational::RationalFunction;

