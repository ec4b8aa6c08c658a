//! Scalar abstraction shared by every module.
//!
//! All numerical code is written against [`Real`], implemented for `f32` and
//! `f64`. Tolerances are given as `f64` literals and converted with [`lit`].

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + LowerExp + Display + Debug + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(to_f64(z.re), to_f64(z.im))
}

#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    cplx(z.re, z.im)
}

/// Modulus `|z|`, computed without overflow.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    ComplexField::sqrt(z)
}

#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    ComplexField::exp(z)
}

/// Machine epsilon of the scalar type.
#[inline]
pub fn eps<T: Real>() -> T {
    T::default_epsilon()
}

/// Parse `"a+bi"`, `"a-bi"`, `"bi"`, `"a"`, `"i"` with optional whitespace.
pub fn parse_complex(text: &str) -> Option<Complex<f64>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let s = s.replace('j', "i");
    if let Some(body) = s.strip_suffix('i') {
        // Split at the last sign that is not part of an exponent.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse::<f64>().ok()?,
        };
        let re = re_part.parse::<f64>().ok()?;
        Some(Complex::new(re, im))
    } else {
        s.parse::<f64>().ok().map(|re| Complex::new(re, 0.0))
    }
}

pub fn format_complex(z: Complex<f64>) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_complex_syntax() {
        assert_eq!(parse_complex("1+2i"), Some(Complex::new(1.0, 2.0)));
        assert_eq!(parse_complex(" 1 - 2.5 i "), Some(Complex::new(1.0, -2.5)));
        assert_eq!(parse_complex("2i"), Some(Complex::new(0.0, 2.0)));
        assert_eq!(parse_complex("-i"), Some(Complex::new(0.0, -1.0)));
        assert_eq!(parse_complex("3"), Some(Complex::new(3.0, 0.0)));
        assert_eq!(parse_complex("1e-3+2e+2i"), Some(Complex::new(1e-3, 200.0)));
        assert_eq!(parse_complex("x"), None);
        assert_eq!(parse_complex(""), None);
    }

    #[test]
    fn format_round_trips() {
        let z = Complex::new(0.1, -3.25);
        assert_eq!(parse_complex(&format_complex(z)), Some(z));
    }
}
