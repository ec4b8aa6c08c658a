use num_complex::Complex;

use super::poly::{cluster, ComplexPolynomial};
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{cabs, cexp, cplx, csqrt, eps, imag_unit, lit, real, Real};

/// Square matrix of scalar rational functions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix<T: Real> {
    dim: usize,
    entries: Vec<RationalFunction<T>>,
}

impl<T: Real> RationalMatrix<T> {
    pub fn new(dim: usize, entries: Vec<RationalFunction<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} rational matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction<T> {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[RationalFunction<T>] {
        &self.entries
    }
}

/// Closed-form scalar functions from the literature that have no rational
/// representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin<T: Real> {
    /// `(2 + πiz − (2 − πiz)e^{2πiz}) / (πz(e^{2πiz} − 1))`, optionally negated.
    Example1 { negated: bool },
    /// `1 / ((1 + 2γ²)z − 2γ²√(z² − 1) − d)`.
    Example2 { gamma: T, d: T },
}

/// Symmetric meromorphic matrix function.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFunction<T: Real> {
    Rational(RationalMatrix<T>),
    Builtin(Builtin<T>),
    BlockDiag(Vec<MatrixFunction<T>>),
}

/// `V(z) = Σ_k P_k z^k + C₀ + C₁/z + …` as `z → ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentExpansion<T: Real> {
    /// `polynomial_part[k]` multiplies `z^{k+1}`.
    pub polynomial_part: Vec<CMat<T>>,
    /// `tail[j]` is `C_j`.
    pub tail: Vec<CMat<T>>,
}

impl<T: Real> LaurentExpansion<T> {
    /// Degree of the polynomial part (0 when there is none).
    pub fn polynomial_degree(&self) -> usize {
        self.polynomial_part
            .iter()
            .rposition(|m| m.iter().any(|c| c.re != T::zero() || c.im != T::zero()))
            .map_or(0, |k| k + 1)
    }

    /// Scalar polynomial part including `C₀` as constant term.
    pub fn scalar_polynomial_part(&self) -> ComplexPolynomial<T> {
        let mut c = vec![self.tail.first().map_or(Complex::new(T::zero(), T::zero()), |m| m[(0, 0)])];
        c.extend(self.polynomial_part.iter().map(|m| m[(0, 0)]));
        ComplexPolynomial::new(c)
    }

    /// Evaluate the truncated expansion.
    pub fn eval(&self, z: Complex<T>) -> CMat<T> {
        let dim = self.tail.first().map_or(0, |m| m.nrows());
        let mut out = CMat::zeros(dim, dim);
        let mut zk = z;
        for p in &self.polynomial_part {
            out += p * zk;
            zk *= z;
        }
        let w = Complex::new(T::one(), T::zero()) / z;
        let mut wk = Complex::new(T::one(), T::zero());
        for c in &self.tail {
            out += c * wk;
            wk *= w;
        }
        out
    }
}

/// Principal part at one pole: `Σ_j coefficients[j−1] / (z − pole)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm<T: Real> {
    pub pole: Complex<T>,
    pub order: usize,
    pub coefficients: Vec<CMat<T>>,
}

impl<T: Real> PoleTerm<T> {
    pub fn eval(&self, z: Complex<T>) -> CMat<T> {
        let w = Complex::new(T::one(), T::zero()) / (z - self.pole);
        let mut wk = w;
        let dim = self.coefficients[0].nrows();
        let mut out = CMat::zeros(dim, dim);
        for c in &self.coefficients {
            out += c * wk;
            wk *= w;
        }
        out
    }
}

impl<T: Real> MatrixFunction<T> {
    /// Scalar rational function from real coefficients (ascending degree).
    pub fn scalar_real(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::scalar(RationalFunction::new(
            ComplexPolynomial::from_real(num),
            ComplexPolynomial::from_real(den),
        )?)
    }

    pub fn scalar(f: RationalFunction<T>) -> Result<Self> {
        Ok(Self::Rational(RationalMatrix::new(1, vec![f])?))
    }

    pub fn example1() -> Self {
        Self::Builtin(Builtin::Example1 { negated: false })
    }

    pub fn example2(gamma: T, d: T) -> Result<Self> {
        if gamma == T::zero() {
            return Err(Error::Domain("example2 requires gamma != 0".into()));
        }
        Ok(Self::Builtin(Builtin::Example2 { gamma, d }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Rational(r) => r.dim,
            Self::Builtin(_) => 1,
            Self::BlockDiag(blocks) => blocks.iter().map(Self::dim).sum(),
        }
    }

    /// Rational data of a 1×1 rational function.
    pub fn as_scalar_rational(&self) -> Option<&RationalFunction<T>> {
        match self {
            Self::Rational(r) if r.dim == 1 => Some(&r.entries[0]),
            Self::BlockDiag(b) if b.len() == 1 => b[0].as_scalar_rational(),
            _ => None,
        }
    }

    /// True when every leaf is rational.
    pub fn is_rational(&self) -> bool {
        match self {
            Self::Rational(_) => true,
            Self::Builtin(_) => false,
            Self::BlockDiag(b) => b.iter().all(Self::is_rational),
        }
    }

    pub fn eval(&self, z: Complex<T>) -> Result<CMat<T>> {
        match self {
            Self::Rational(r) => {
                let mut out = CMat::zeros(r.dim, r.dim);
                for i in 0..r.dim {
                    for j in 0..r.dim {
                        out[(i, j)] = r.entry(i, j).eval(z)?;
                    }
                }
                Ok(out)
            }
            Self::Builtin(b) => Ok(linalg::scalar_matrix(b.eval(z)?)),
            Self::BlockDiag(blocks) => {
                let vals = blocks.iter().map(|b| b.eval(z)).collect::<Result<Vec<_>>>()?;
                Ok(linalg::block_diag(&vals))
            }
        }
    }

    /// `V′(z)`: exact for rational entries, Richardson-extrapolated central
    /// differences for builtins.
    pub fn derivative_eval(&self, z: Complex<T>) -> Result<CMat<T>> {
        match self {
            Self::Rational(r) => {
                let mut out = CMat::zeros(r.dim, r.dim);
                for i in 0..r.dim {
                    for j in 0..r.dim {
                        out[(i, j)] = r.entry(i, j).derivative_eval(z)?;
                    }
                }
                Ok(out)
            }
            Self::Builtin(b) => Ok(linalg::scalar_matrix(richardson(|w| b.eval(w), z)?)),
            Self::BlockDiag(blocks) => {
                let vals = blocks.iter().map(|b| b.derivative_eval(z)).collect::<Result<Vec<_>>>()?;
                Ok(linalg::block_diag(&vals))
            }
        }
    }

    /// Whether `V(z̄) = V(z)*` holds identically.
    pub fn symmetry_check(&self) -> bool {
        match self {
            Self::Rational(r) => (0..r.dim).all(|i| {
                (i..r.dim).all(|j| {
                    let a = r.entry(i, j);
                    let b = r.entry(j, i).sharp();
                    let lhs = a.num() * b.den();
                    let rhs = b.num() * a.den();
                    let diff = (&lhs - &rhs).norm();
                    diff <= lit::<T>(1e-12) * T::one().max(lhs.norm()).max(rhs.norm())
                })
            }),
            // Both closed forms have real parameters and are built from
            // functions with real Taylor data.
            Self::Builtin(_) => true,
            Self::BlockDiag(blocks) => blocks.iter().all(Self::symmetry_check),
        }
    }

    /// Expansion at infinity up to `C_order`.
    pub fn laurent_at_infinity(&self, order: usize) -> Result<LaurentExpansion<T>> {
        match self {
            Self::Rational(r) => {
                let n = r.dim;
                let per: Vec<(Vec<Complex<T>>, Vec<Complex<T>>)> =
                    r.entries.iter().map(|f| scalar_laurent(f, order)).collect::<Result<_>>()?;
                let pdeg = per.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
                let mut poly = vec![CMat::zeros(n, n); pdeg];
                let mut tail = vec![CMat::zeros(n, n); order + 1];
                for (idx, (p, t)) in per.iter().enumerate() {
                    let (i, j) = (idx / n, idx % n);
                    for (k, &c) in p.iter().enumerate() {
                        poly[k][(i, j)] = c;
                    }
                    for (k, &c) in t.iter().enumerate() {
                        tail[k][(i, j)] = c;
                    }
                }
                Ok(LaurentExpansion { polynomial_part: poly, tail })
            }
            Self::Builtin(_) => Err(Error::Unsupported(
                "Laurent expansion requires rational data; builtins use the numeric path".into(),
            )),
            Self::BlockDiag(blocks) => {
                let parts = blocks
                    .iter()
                    .map(|b| b.laurent_at_infinity(order))
                    .collect::<Result<Vec<_>>>()?;
                let pdeg = parts.iter().map(|p| p.polynomial_part.len()).max().unwrap_or(0);
                let pick = |v: &Vec<CMat<T>>, k: usize, d: usize| v.get(k).cloned().unwrap_or_else(|| CMat::zeros(d, d));
                let dims: Vec<usize> = blocks.iter().map(Self::dim).collect();
                let poly = (0..pdeg)
                    .map(|k| {
                        let bs: Vec<_> = parts.iter().zip(&dims).map(|(p, &d)| pick(&p.polynomial_part, k, d)).collect();
                        linalg::block_diag(&bs)
                    })
                    .collect();
                let tail = (0..=order)
                    .map(|k| {
                        let bs: Vec<_> = parts.iter().zip(&dims).map(|(p, &d)| pick(&p.tail, k, d)).collect();
                        linalg::block_diag(&bs)
                    })
                    .collect();
                Ok(LaurentExpansion { polynomial_part: poly, tail })
            }
        }
    }

    /// Principal parts at every pole of a strictly proper rational function.
    pub fn partial_fractions(&self) -> Result<Vec<PoleTerm<T>>> {
        let r = match self {
            Self::Rational(r) => r,
            Self::BlockDiag(_) if self.is_rational() => {
                return Err(Error::Unsupported("partial fractions of a block-diagonal composition".into()))
            }
            _ => return Err(Error::Unsupported("partial fractions require rational data".into())),
        };
        let n = r.dim;
        let mut raw: Vec<(usize, Complex<T>, Vec<Complex<T>>)> = Vec::new();
        for (idx, f) in r.entries.iter().enumerate() {
            if !f.is_strictly_proper() {
                return Err(Error::Domain("partial fractions need a strictly proper function".into()));
            }
            if f.is_zero() {
                continue;
            }
            for (pole, coeffs) in scalar_partial_fractions(f)? {
                raw.push((idx, pole, coeffs));
            }
        }
        let locations: Vec<Complex<T>> = raw.iter().map(|t| t.1).collect();
        let merged = cluster(&locations, lit(1e-6));
        let mut terms: Vec<PoleTerm<T>> = merged
            .iter()
            .map(|&(pole, _)| PoleTerm { pole, order: 0, coefficients: Vec::new() })
            .collect();
        for (idx, pole, coeffs) in raw {
            let t = terms
                .iter_mut()
                .min_by(|a, b| {
                    cabs(a.pole - pole).partial_cmp(&cabs(b.pole - pole)).unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("pole belongs to a cluster");
            while t.coefficients.len() < coeffs.len() {
                t.coefficients.push(CMat::zeros(n, n));
            }
            t.order = t.coefficients.len();
            for (k, c) in coeffs.into_iter().enumerate() {
                t.coefficients[k][(idx / n, idx % n)] = c;
            }
        }
        Ok(terms)
    }

    /// Poles of a scalar function in the open upper half-plane.
    ///
    /// Rational inputs use the denominator roots; other inputs run Newton's
    /// method on `1/V` from a grid of starting points in `[−5,5] × i(0,5]`.
    pub fn upper_poles(&self) -> Result<Vec<Complex<T>>> {
        if self.dim() != 1 {
            return Err(Error::Dimension("pole search is defined for scalar functions".into()));
        }
        if let Some(f) = self.as_scalar_rational() {
            let tol = lit::<T>(1e-12);
            return Ok(f.den().roots()?.into_iter().filter(|r| r.im > tol).collect());
        }
        let g = |z: Complex<T>| -> Option<Complex<T>> {
            match self.eval(z) {
                Ok(v) => Some(Complex::new(T::one(), T::zero()) / v[(0, 0)]),
                Err(Error::Pole { .. }) => Some(Complex::new(T::zero(), T::zero())),
                Err(_) => None,
            }
        };
        let mut found: Vec<Complex<T>> = Vec::new();
        for ix in 0..=10 {
            for iy in 1..=8 {
                let mut z = cplx::<T>(-5.0 + ix as f64, 0.625 * iy as f64);
                let mut converged = false;
                for _ in 0..80 {
                    let Some(gz) = g(z) else { break };
                    if cabs(gz) == T::zero() {
                        converged = true;
                        break;
                    }
                    let h = lit::<T>(1e-6) * T::one().max(cabs(z));
                    let (Some(gp), Some(gm)) = (g(z + real(h)), g(z - real(h))) else { break };
                    let dg = (gp - gm) / real(h + h);
                    if cabs(dg) == T::zero() {
                        break;
                    }
                    let step = gz / dg;
                    z -= step;
                    if z.im <= T::zero() || !z.re.is_finite() || !z.im.is_finite() {
                        break;
                    }
                    if cabs(step) <= lit::<T>(4.0) * eps::<T>() * T::one().max(cabs(z)) {
                        converged = true;
                        break;
                    }
                }
                if !converged || z.im <= lit(1e-8) {
                    continue;
                }
                let residual = g(z).map_or(T::max_value().unwrap_or(T::one()), cabs);
                if residual > lit::<T>(1e-8) {
                    continue;
                }
                if !found.iter().any(|&w| cabs(w - z) <= lit::<T>(1e-8) * T::one().max(cabs(z))) {
                    found.push(z);
                }
            }
        }
        Ok(found)
    }
}

impl<T: Real> Builtin<T> {
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        match *self {
            Builtin::Example1 { negated } => {
                let v = example1(z)?;
                Ok(if negated { -v } else { v })
            }
            Builtin::Example2 { gamma, d } => example2(gamma, d, z),
        }
    }
}

fn example1<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let pi = T::pi();
    let two = real(lit::<T>(2.0));
    let piz = z * pi;
    let ipiz = imag_unit::<T>() * piz;
    // In the lower half-plane e^{2πiz} grows; multiply through by e^{−2πiz}.
    let (num, den, scale) = if z.im >= T::zero() {
        let e = cexp(ipiz + ipiz);
        let num = two + ipiz - (two - ipiz) * e;
        let den = piz * (e - real(T::one()));
        (num, den, cabs(piz) * (T::one() + cabs(e)))
    } else {
        let f = cexp(-(ipiz + ipiz));
        let num = (two + ipiz) * f - (two - ipiz);
        let den = piz * (real(T::one()) - f);
        (num, den, cabs(piz) * (T::one() + cabs(f)))
    };
    if cabs(den) <= lit::<T>(64.0) * eps::<T>() * scale || cabs(den) == T::zero() {
        return Err(Error::pole(z));
    }
    Ok(num / den)
}

/// `√(z² − 1)` with `Im > 0` in the upper half-plane.
pub fn sqrt_z2_minus_1<T: Real>(z: Complex<T>) -> Complex<T> {
    csqrt(z - real(T::one())) * csqrt(z + real(T::one()))
}

fn example2<T: Real>(gamma: T, d: T, z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() && z.re.abs() <= T::one() {
        return Err(Error::Domain(format!(
            "z = {} lies on the branch cut [-1, 1] of sqrt(z^2 - 1)",
            crate::scalar::to_f64(z.re)
        )));
    }
    let g2 = gamma * gamma;
    let two = lit::<T>(2.0);
    let s = sqrt_z2_minus_1(z);
    let a = T::one() + two * g2;
    let den = z * a - s * (two * g2) - real(d);
    let scale = a * cabs(z) + two * g2 * cabs(s) + d.abs();
    if cabs(den) <= lit::<T>(16.0) * eps::<T>() * scale {
        return Err(Error::pole(z));
    }
    Ok(Complex::new(T::one(), T::zero()) / den)
}

/// Central difference with three-level Richardson extrapolation.
fn richardson<T: Real>(f: impl Fn(Complex<T>) -> Result<Complex<T>>, z: Complex<T>) -> Result<Complex<T>> {
    f(z)?;
    let mut h = lit::<T>(1e-2) * T::one().max(cabs(z));
    if z.im != T::zero() {
        h = h.min(z.im.abs() * lit(0.25));
    }
    let diff = |h: T| -> Result<Complex<T>> { Ok((f(z + real(h))? - f(z - real(h))?) / real(h + h)) };
    let d1 = diff(h)?;
    let d2 = diff(h * lit(0.5))?;
    let d3 = diff(h * lit(0.25))?;
    let r1 = (d2 * lit::<T>(4.0) - d1) / lit::<T>(3.0);
    let r2 = (d3 * lit::<T>(4.0) - d2) / lit::<T>(3.0);
    Ok((r2 * lit::<T>(16.0) - r1) / lit::<T>(15.0))
}

/// Polynomial part (coefficients of `z¹, z², …`) and tail `C₀…C_order`.
fn scalar_laurent<T: Real>(f: &RationalFunction<T>, order: usize) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    let zero = Complex::new(T::zero(), T::zero());
    let (q, r) = f.num().div_rem(f.den())?;
    let poly: Vec<Complex<T>> = (1..q.coeffs().len()).map(|k| q.coeff(k)).collect();
    let mut tail = vec![zero; order + 1];
    tail[0] = q.coeff(0);
    // R/D = Σ_{j≥1} c_j z^{−j}, D monic of degree n.
    let n = f.den().degree() as i64;
    let d = |i: i64| if i < 0 { zero } else { f.den().coeff(i as usize) };
    let rc = |i: i64| if i < 0 { zero } else { r.coeff(i as usize) };
    for j in 1..=order {
        let mut c = rc(n - j as i64);
        for k in 1..j {
            c -= d(n - j as i64 + k as i64) * tail[k];
        }
        tail[j] = c;
    }
    Ok((poly, tail))
}

/// Principal parts of a strictly proper scalar function; coefficient `k`
/// multiplies `1/(z − p)^{k+1}`.
fn scalar_partial_fractions<T: Real>(f: &RationalFunction<T>) -> Result<Vec<(Complex<T>, Vec<Complex<T>>)>> {
    let clusters = f.den().root_clusters()?;
    let mut out = Vec::with_capacity(clusters.len());
    for (i, &(p, k)) in clusters.iter().enumerate() {
        let mut other = ComplexPolynomial::one();
        for (j, &(q, m)) in clusters.iter().enumerate() {
            if j != i {
                other = &other * &ComplexPolynomial::from_roots(&vec![q; m]);
            }
        }
        let nt = f.num().taylor_at(p);
        let ot = other.taylor_at(p);
        let zero = Complex::new(T::zero(), T::zero());
        let at = |v: &Vec<Complex<T>>, i: usize| v.get(i).copied().unwrap_or(zero);
        let mut g = Vec::with_capacity(k);
        for l in 0..k {
            let mut acc = at(&nt, l);
            for s in 1..=l {
                acc -= at(&ot, s) * g[l - s];
            }
            g.push(acc / at(&ot, 0));
        }
        // g_l multiplies (z − p)^{l − k}.
        let coeffs: Vec<Complex<T>> = (1..=k).map(|power| g[k - power]).collect();
        out.push((p, coeffs));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = MatrixFunction<f64>;

    fn cplx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn scalar(v: &CMat<f64>) -> Complex<f64> {
        v[(0, 0)]
    }

    #[test]
    fn minus_inverse_at_i() {
        let f = F::scalar_real(&[-1.0], &[0.0, 1.0]).unwrap();
        assert!((scalar(&f.eval(cplx(0.0, 1.0)).unwrap()) - cplx(0.0, 1.0)).norm() < 1e-15);
        assert!(matches!(f.eval(cplx(0.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn example2_at_2i_matches_closed_form() {
        let f = F::example2(1.0, 0.0).unwrap();
        let v = scalar(&f.eval(cplx(0.0, 2.0)).unwrap());
        let expected = cplx(0.0, -(3.0 + 5f64.sqrt()) / 8.0);
        assert!((v - expected).norm() < 1e-14, "{v}");
        assert!((v.im + 0.65451).abs() < 1e-5);
    }

    #[test]
    fn example2_quadrature_oracle() {
        // (2/π)∫√(1−t²)/(t−z) dt by Gauss–Chebyshev of the second kind gives
        // 2(z − √(z²−1)) with sign; V = 1/((1+2γ²)z − 2γ²√(z²−1) − d) equals
        // 1/(z − d + γ²·(2/π)∫√(1−t²)/(t−z)dt · (−1)).
        let z = cplx(0.3, 0.7);
        let n = 400;
        let mut integral = cplx(0.0, 0.0);
        for k in 1..=n {
            let th = k as f64 * std::f64::consts::PI / (n as f64 + 1.0);
            let w = 2.0 / (n as f64 + 1.0) * th.sin().powi(2);
            integral += cplx(w, 0.0) / (cplx(th.cos(), 0.0) - z);
        }
        // Σ w/(t−z) ≈ 2(√(z²−1) − z)
        let s = sqrt_z2_minus_1(z);
        assert!((integral - (s - z) * 2.0).norm() < 1e-10);
        let (g, d) = (1.3, 0.2);
        let v = scalar(&F::example2(g, d).unwrap().eval(z).unwrap());
        let via_quad = cplx(1.0, 0.0) / (z - d - integral * (g * g));
        assert!((v - via_quad).norm() < 1e-9 * v.norm());
    }

    #[test]
    fn example2_symmetric_below_axis() {
        let f = F::example2(0.8, 0.3).unwrap();
        let z = cplx(0.4, 1.1);
        let up = scalar(&f.eval(z).unwrap());
        let down = scalar(&f.eval(z.conj()).unwrap());
        assert!((up.conj() - down).norm() < 1e-15);
        assert!(sqrt_z2_minus_1(z).im > 0.0);
    }

    #[test]
    fn example1_tends_to_minus_i() {
        let f = F::example1();
        for y in [5.0, 20.0, 100.0] {
            let v = scalar(&f.eval(cplx(0.0, y)).unwrap());
            // Dominant terms: (2 − πy)/(−πiy) = −i − 2/(πiy).
            let lead = cplx(0.0, -1.0) - cplx(2.0, 0.0) / (cplx(0.0, std::f64::consts::PI * y));
            assert!((v - lead).norm() < 1e-10, "{y}: {v}");
        }
        let far = scalar(&f.eval(cplx(0.0, 1e6)).unwrap());
        assert!((far - cplx(0.0, -1.0)).norm() < 1e-5);
        let below = scalar(&f.eval(cplx(0.3, -400.0)).unwrap());
        assert!(below.re.is_finite() && below.im.is_finite());
        let above = scalar(&f.eval(cplx(0.3, 400.0)).unwrap());
        assert!((below - above.conj()).norm() < 1e-12);
    }

    #[test]
    fn example1_has_integer_poles() {
        let f = F::example1();
        assert!(matches!(f.eval(cplx(2.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn derivative_examples() {
        let f = F::scalar_real(&[-1.0], &[0.0, 1.0]).unwrap();
        assert!((scalar(&f.derivative_eval(cplx(0.0, 1.0)).unwrap()) - cplx(-1.0, 0.0)).norm() < 1e-15);
        let cube = F::scalar_real(&[0.0, 0.0, 0.0, 1.0], &[1.0]).unwrap();
        assert!((scalar(&cube.derivative_eval(cplx(2.0, 0.0)).unwrap()) - cplx(12.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn example2_derivative_matches_difference_oracle() {
        let f = F::example2(1.0, 0.0).unwrap();
        let z = cplx(0.0, 2.0);
        let got = scalar(&f.derivative_eval(z).unwrap());
        let v = |w: Complex<f64>| scalar(&f.eval(w).unwrap());
        let central = |h: f64| (v(z + h) - v(z - h)) / (2.0 * h);
        let oracle = (central(1e-4) * 4.0 - central(2e-4)) / 3.0;
        assert!((got - oracle).norm() <= 1e-8 * oracle.norm(), "{got} vs {oracle}");
        // Analytic: V' = −V²·((1+2γ²) − 2γ² z/√(z²−1)).
        let s = sqrt_z2_minus_1(z);
        let exact = -(v(z) * v(z)) * (cplx(3.0, 0.0) - z * 2.0 / s);
        assert!((got - exact).norm() <= 1e-9 * exact.norm());
    }

    #[test]
    fn symmetry_examples() {
        assert!(F::scalar_real(&[-1.0], &[0.0, 1.0]).unwrap().symmetry_check());
        let asym = F::scalar(
            RationalFunction::new(ComplexPolynomial::one(), ComplexPolynomial::new(vec![cplx(0.0, -1.0), cplx(1.0, 0.0)]))
                .unwrap(),
        )
        .unwrap();
        assert!(!asym.symmetry_check());
        assert!(F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap().symmetry_check());
    }

    #[test]
    fn laurent_examples() {
        let l = F::scalar_real(&[-1.0], &[0.0, 1.0]).unwrap().laurent_at_infinity(3).unwrap();
        assert_eq!(l.polynomial_degree(), 0);
        assert_eq!(scalar(&l.tail[0]), cplx(0.0, 0.0));
        assert_eq!(scalar(&l.tail[1]), cplx(-1.0, 0.0));

        let l = F::scalar_real(&[0.0, 0.0, 0.0, 1.0], &[1.0]).unwrap().laurent_at_infinity(3).unwrap();
        assert_eq!(l.polynomial_degree(), 3);
        assert_eq!(l.scalar_polynomial_part(), ComplexPolynomial::from_real(&[0.0, 0.0, 0.0, 1.0]));
        assert!(l.tail.iter().all(|c| scalar(c) == cplx(0.0, 0.0)));

        let l = F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap().laurent_at_infinity(3).unwrap();
        let t: Vec<_> = l.tail.iter().map(scalar).collect();
        assert_eq!(t, vec![cplx(0.0, 0.0), cplx(-1.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)]);
    }

    #[test]
    fn partial_fraction_examples() {
        let pf = F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap().partial_fractions().unwrap();
        assert_eq!(pf.len(), 2);
        for t in &pf {
            assert_eq!(t.order, 1);
            assert!((t.pole.norm() - 1.0).abs() < 1e-14 && t.pole.re.abs() < 1e-14);
            assert!((scalar(&t.coefficients[0]) - cplx(-0.5, 0.0)).norm() < 1e-14);
        }
        let pf = F::scalar_real(&[-1.0], &[0.0, 0.0, 1.0]).unwrap().partial_fractions().unwrap();
        assert_eq!(pf.len(), 1);
        assert_eq!(pf[0].order, 2);
        assert!(scalar(&pf[0].coefficients[0]).norm() < 1e-14);
        assert!((scalar(&pf[0].coefficients[1]) - cplx(-1.0, 0.0)).norm() < 1e-14);
        let pf = F::scalar_real(&[1.0], &[0.0, 1.0]).unwrap().partial_fractions().unwrap();
        assert_eq!((pf[0].order, scalar(&pf[0].coefficients[0])), (1, cplx(1.0, 0.0)));
        assert!(matches!(
            F::scalar_real(&[0.0, 1.0], &[1.0]).unwrap().partial_fractions(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn example2_pole_search() {
        // Oracle: squaring (1+2γ²)z − d = 2γ²√(z²−1) gives
        // (1+4γ²)z² − 2d(1+2γ²)z + d² + 4γ⁴ = 0; keep roots that solve the
        // unsquared equation on the prescribed branch.
        for (g, d) in [(1.0f64, 0.0f64), (1.0, 0.5), (2.0, 1.0)] {
            let f = F::example2(g, d).unwrap();
            let poles = f.upper_poles().unwrap();
            assert_eq!(poles.len(), 1, "{g} {d}: {poles:?}");
            let q = ComplexPolynomial::<f64>::from_real(&[
                d * d + 4.0 * g.powi(4),
                -2.0 * d * (1.0 + 2.0 * g * g),
                1.0 + 4.0 * g * g,
            ]);
            let root = q.roots().unwrap().into_iter().find(|r| r.im > 0.0).unwrap();
            assert!((poles[0] - root).norm() < 1e-10 * root.norm());
        }
    }
}
