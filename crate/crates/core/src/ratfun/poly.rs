use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{cabs, lit, Real};

/// Complex polynomial with coefficients in ascending degree.
///
/// Trailing exact zeros are trimmed, so the leading coefficient is nonzero
/// unless the polynomial is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> ComplexPolynomial<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == T::zero() && c.im == T::zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(lit(c), T::zero())).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(T::one(), T::zero()))
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut p = Self::one();
        for &r in roots {
            p = &p * &Self::new(vec![-r, Complex::new(T::one(), T::zero())]);
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt()
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
    }

    /// `Σ |c_k| |z|^k`, the natural scale for rounding error in [`eval`](Self::eval).
    pub fn eval_scale(&self, z: Complex<T>) -> T {
        let r = cabs(z);
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * r + cabs(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * lit::<T>(k as f64))
                .collect(),
        )
    }

    /// `p♯(z) = conj(p(conj z))`: conjugate every coefficient.
    pub fn sharp(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        let mut out = self.scale(Complex::new(T::one(), T::zero()) / lc);
        if let Some(last) = out.coeffs.last_mut() {
            *last = Complex::new(T::one(), T::zero());
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Quotient and remainder of polynomial long division.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::Domain("division by the zero polynomial".into()));
        }
        let n = divisor.degree();
        if self.is_zero() || self.degree() < n {
            return Ok((Self::zero(), self.clone()));
        }
        let lc = divisor.leading();
        let mut rem = self.coeffs.clone();
        let qlen = self.degree() - n + 1;
        let mut quot = vec![Complex::new(T::zero(), T::zero()); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + n] / lc;
            quot[k] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * d;
            }
            rem[k + n] = Complex::new(T::zero(), T::zero());
        }
        rem.truncate(n);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Coefficients of `w ↦ p(a + w)`.
    pub fn taylor_at(&self, a: Complex<T>) -> Vec<Complex<T>> {
        // Repeated synthetic division.
        let mut c = self.coeffs.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let next = c[j + 1];
                c[j] += a * next;
            }
        }
        c
    }

    /// Roots as a multiset, with clustered multiple roots replaced by their
    /// cluster mean.
    pub fn roots(&self) -> Result<Vec<Complex<T>>> {
        Ok(self
            .root_clusters()?
            .into_iter()
            .flat_map(|(r, m)| std::iter::repeat_n(r, m))
            .collect())
    }

    /// Distinct roots with multiplicities.
    ///
    /// Eigenvalues of the companion matrix, grouped when closer than
    /// `1e-4·max(1, |r|)`. Simple roots get one Newton step.
    pub fn root_clusters(&self) -> Result<Vec<(Complex<T>, usize)>> {
        if self.is_zero() {
            return Err(Error::Domain("roots of the zero polynomial".into()));
        }
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let raw = self.companion_eigenvalues()?;
        let mut clusters = cluster(&raw, lit(1e-4));
        let dp = self.derivative();
        for (r, m) in clusters.iter_mut() {
            if *m != 1 {
                continue;
            }
            let d = dp.eval(*r);
            if cabs(d) == T::zero() {
                continue;
            }
            let cand = *r - self.eval(*r) / d;
            if cabs(self.eval(cand)) < cabs(self.eval(*r)) {
                *r = cand;
            }
        }
        Ok(clusters)
    }

    fn companion_eigenvalues(&self) -> Result<Vec<Complex<T>>> {
        // Exact roots at the origin are split off first: the nilpotent
        // companion block defeats the shifted QR iteration.
        let zeros = self.coeffs.iter().take_while(|c| c.re == T::zero() && c.im == T::zero()).count();
        let rest = Self::new(self.coeffs[zeros..].to_vec());
        let mut out = vec![Complex::new(T::zero(), T::zero()); zeros];
        if rest.degree() == 0 {
            return Ok(out);
        }
        let direct = linalg::eigenvalues(&companion(&rest));
        let roots = match direct {
            Some(r) => r,
            None => {
                // Retry on a shifted copy p(w + s).
                let s = Complex::new(lit::<T>(0.3125), lit::<T>(0.127));
                let shifted = Self::new(rest.taylor_at(s));
                linalg::eigenvalues(&companion(&shifted))
                    .ok_or_else(|| Error::Inconclusive("companion eigenvalue iteration did not converge".into()))?
                    .into_iter()
                    .map(|w| w + s)
                    .collect()
            }
        };
        out.extend(roots);
        Ok(out)
    }

    /// Approximate greatest common divisor, monic.
    ///
    /// The degree is the numerical nullity of the Sylvester matrix of the
    /// normalized inputs (singular values below `1e-10·σ_max`). The factor is
    /// assembled from the closest root pairs.
    pub fn approx_gcd(a: &Self, b: &Self) -> Result<Self> {
        if a.is_zero() {
            return Ok(b.monic());
        }
        if b.is_zero() {
            return Ok(a.monic());
        }
        let (m, n) = (a.degree(), b.degree());
        if m == 0 || n == 0 {
            return Ok(Self::one());
        }
        let an = a.scale(Complex::new(T::one() / a.norm(), T::zero()));
        let bn = b.scale(Complex::new(T::one() / b.norm(), T::zero()));
        let size = m + n;
        let mut s: CMat<T> = CMat::zeros(size, size);
        for r in 0..n {
            for (k, &c) in an.coeffs.iter().rev().enumerate() {
                s[(r, r + k)] = c;
            }
        }
        for r in 0..m {
            for (k, &c) in bn.coeffs.iter().rev().enumerate() {
                s[(n + r, r + k)] = c;
            }
        }
        let sv = linalg::singular_values(&s);
        let smax = sv.first().copied().unwrap_or_else(T::zero);
        let nullity = sv.iter().filter(|&&x| x <= lit::<T>(1e-10) * smax).count();
        if nullity == 0 {
            return Ok(Self::one());
        }
        let mut ra = a.roots()?;
        let mut rb = b.roots()?;
        let mut common = Vec::with_capacity(nullity);
        for _ in 0..nullity.min(m).min(n) {
            let mut best = (0, 0, T::max_value().unwrap_or(lit(f64::MAX)));
            for (i, &x) in ra.iter().enumerate() {
                for (j, &y) in rb.iter().enumerate() {
                    let d = cabs(x - y);
                    if d < best.2 {
                        best = (i, j, d);
                    }
                }
            }
            let x = ra.swap_remove(best.0);
            let y = rb.swap_remove(best.1);
            common.push((x + y) * lit::<T>(0.5));
        }
        Ok(Self::from_roots(&common))
    }

    /// True when every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == T::zero())
    }

    pub fn map<U: Real>(&self, f: impl Fn(Complex<T>) -> Complex<U>) -> ComplexPolynomial<U> {
        ComplexPolynomial::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }
}

fn companion<T: Real>(p: &ComplexPolynomial<T>) -> CMat<T> {
    let n = p.degree();
    let lc = p.leading();
    let mut c: CMat<T> = CMat::zeros(n, n);
    for j in 0..n {
        c[(0, j)] = -p.coeffs[n - 1 - j] / lc;
    }
    for i in 1..n {
        c[(i, i - 1)] = Complex::new(T::one(), T::zero());
    }
    c
}

/// Single-linkage clustering of points closer than `tol·max(1, |r|)`;
/// returns cluster means with sizes.
pub(crate) fn cluster<T: Real>(points: &[Complex<T>], tol: T) -> Vec<(Complex<T>, usize)> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = T::one().max(cabs(points[i])).max(cabs(points[j]));
            if cabs(points[i] - points[j]) <= tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex<T>, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((root, points[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, m)| (sum / lit::<T>(m as f64), m))
        .collect()
}

impl<T: Real> Add for &ComplexPolynomial<T> {
    type Output = ComplexPolynomial<T>;
    fn add(self, rhs: Self) -> Self::Output {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for &ComplexPolynomial<T> {
    type Output = ComplexPolynomial<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Mul for &ComplexPolynomial<T> {
    type Output = ComplexPolynomial<T>;
    fn mul(self, rhs: Self) -> Self::Output {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPolynomial::zero();
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

impl<T: Real> Neg for &ComplexPolynomial<T> {
    type Output = ComplexPolynomial<T>;
    fn neg(self) -> Self::Output {
        ComplexPolynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}
