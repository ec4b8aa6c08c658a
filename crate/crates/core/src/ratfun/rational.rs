use num_complex::Complex;

use super::poly::ComplexPolynomial;
use crate::error::{Error, Result};
use crate::scalar::{cabs, eps, lit, Real};

/// Scalar rational function `num/den` in lowest terms with monic `den`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction<T: Real> {
    num: ComplexPolynomial<T>,
    den: ComplexPolynomial<T>,
}

impl<T: Real> RationalFunction<T> {
    /// Reduce to coprime form and normalize the denominator to be monic.
    pub fn new(num: ComplexPolynomial<T>, den: ComplexPolynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = ComplexPolynomial::approx_gcd(&num, &den)?;
        let (num, den) = if g.degree() > 0 {
            (num.div_rem(&g)?.0, den.div_rem(&g)?.0)
        } else {
            (num, den)
        };
        let inv = Complex::new(T::one(), T::zero()) / den.leading();
        Ok(Self { num: num.scale(inv), den: den.monic() })
    }

    pub fn zero() -> Self {
        Self { num: ComplexPolynomial::zero(), den: ComplexPolynomial::one() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self { num: ComplexPolynomial::constant(c), den: ComplexPolynomial::one() }
    }

    pub fn polynomial(p: ComplexPolynomial<T>) -> Self {
        Self { num: p, den: ComplexPolynomial::one() }
    }

    pub fn num(&self) -> &ComplexPolynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &ComplexPolynomial<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree() == 0 && self.den.degree() == 0
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    /// `deg num − deg den`; `None` for the zero function.
    pub fn relative_degree(&self) -> Option<i64> {
        (!self.num.is_zero()).then(|| self.num.degree() as i64 - self.den.degree() as i64)
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let d = self.den.eval(z);
        if cabs(d) <= lit::<T>(16.0) * eps::<T>() * self.den.eval_scale(z) {
            return Err(Error::pole(z));
        }
        Ok(self.num.eval(z) / d)
    }

    pub fn derivative_eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let d = self.den.eval(z);
        if cabs(d) <= lit::<T>(16.0) * eps::<T>() * self.den.eval_scale(z) {
            return Err(Error::pole(z));
        }
        let n = self.num.eval(z);
        let dn = self.num.derivative().eval(z);
        let dd = self.den.derivative().eval(z);
        Ok((dn * d - n * dd) / (d * d))
    }

    /// `f♯(z) = conj(f(conj z))`.
    pub fn sharp(&self) -> Self {
        Self { num: self.num.sharp(), den: self.den.sharp() }
    }

    /// Exact symmetry test `N♯D − ND♯ ≡ 0`, up to rounding in the coefficients.
    pub fn is_real_symmetric(&self) -> bool {
        let lhs = &self.num.sharp() * &self.den;
        let rhs = &self.num * &self.den.sharp();
        let diff = (&lhs - &rhs).norm();
        diff <= lit::<T>(1e-12) * T::one().max(lhs.norm()).max(rhs.norm())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den)
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, den: self.den.clone() }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { num: self.num.scale(s), den: self.den.clone() }
    }

    pub fn map<U: Real>(&self, f: impl Fn(Complex<T>) -> Complex<U> + Copy) -> RationalFunction<U> {
        RationalFunction { num: self.num.map(f), den: self.den.map(f) }
    }
}
