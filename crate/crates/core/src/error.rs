use thiserror::Error;

/// Errors raised by the library. Locations are reported in `f64` regardless
/// of the scalar type used for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    #[error("z = {re}{im:+}i lies in the spectrum of the state operator")]
    Resolvent { re: f64, im: f64 },

    #[error("Schur complement X(z) is singular at z = {re}{im:+}i")]
    SchurComplement { re: f64, im: f64 },

    #[error("inconsistency: {0}")]
    Inconsistent(String),

    #[error("ill-conditioned Gram matrix: {0}")]
    Conditioning(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pole<T: crate::Real>(z: num_complex::Complex<T>) -> Self {
        let z = crate::scalar::to_c64(z);
        Error::Pole { re: z.re, im: z.im }
    }

    pub(crate) fn resolvent<T: crate::Real>(z: num_complex::Complex<T>) -> Self {
        let z = crate::scalar::to_c64(z);
        Error::Resolvent { re: z.re, im: z.im }
    }
}
