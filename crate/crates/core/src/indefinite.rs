//! Indefinite inner products `[x, y] = (Jx, y)` on `ℂⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, Real};

/// Counts of positive, zero and negative eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

impl Inertia {
    pub fn new(n_plus: usize, n_zero: usize, n_minus: usize) -> Self {
        Self { n_plus, n_zero, n_minus }
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_zero + self.n_minus
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }
}

/// Default relative tolerance for a matrix of dimension `n`.
pub fn default_tol<T: Real>(n: usize) -> T {
    lit::<T>(1e-10) * lit::<T>(n.max(1) as f64)
}

/// Inertia together with the sorted eigenvalues and the threshold used.
#[derive(Debug, Clone)]
pub struct InertiaReport<T: Real> {
    pub inertia: Inertia,
    pub eigenvalues: Vec<T>,
    pub threshold: T,
}

/// Eigenvalues below `−τ`, within `±τ` and above `τ`, `τ = tol·max(1, ‖H‖₂)`.
pub fn inertia<T: Real>(h: &CMat<T>, tol: T) -> Result<Inertia> {
    inertia_report(h, tol).map(|r| r.inertia)
}

pub fn inertia_report<T: Real>(h: &CMat<T>, tol: T) -> Result<InertiaReport<T>> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!("inertia of a {}x{} matrix", h.nrows(), h.ncols())));
    }
    let defect = linalg::fro(&(h - h.adjoint()));
    if defect > tol.max(lit(1e-12)) * T::one().max(linalg::fro(h)) {
        return Err(Error::Domain("matrix is not Hermitian within tolerance".into()));
    }
    let eigenvalues = linalg::hermitian_eigenvalues(h);
    let norm = eigenvalues.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let threshold = tol * T::one().max(norm);
    let mut inertia = Inertia::new(0, 0, 0);
    for &v in &eigenvalues {
        if v > threshold {
            inertia.n_plus += 1;
        } else if v < -threshold {
            inertia.n_minus += 1;
        } else {
            inertia.n_zero += 1;
        }
    }
    Ok(InertiaReport { inertia, eigenvalues, threshold })
}

/// Hermitian involution `J` defining `[x, y] = (Jx, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureMetric<T: Real> {
    j: CMat<T>,
    kappa: usize,
}

impl<T: Real> SignatureMetric<T> {
    pub fn new(j: CMat<T>) -> Result<Self> {
        let n = j.nrows();
        if j.ncols() != n {
            return Err(Error::Dimension("metric must be square".into()));
        }
        if linalg::fro(&(&j - j.adjoint())) > lit(1e-12) {
            return Err(Error::Domain("metric is not Hermitian".into()));
        }
        if linalg::fro(&(&j * &j - linalg::identity::<T>(n))) > lit(1e-10) {
            return Err(Error::Domain("metric is not an involution".into()));
        }
        let kappa = linalg::hermitian_eigenvalues(&j).iter().filter(|&&v| v < T::zero()).count();
        Ok(Self { j, kappa })
    }

    pub fn identity(n: usize) -> Self {
        Self { j: linalg::identity(n), kappa: 0 }
    }

    /// `diag(I_p, −I_q)`.
    pub fn standard(p: usize, q: usize) -> Self {
        let signs: Vec<T> = (0..p).map(|_| T::one()).chain((0..q).map(|_| -T::one())).collect();
        Self { j: linalg::from_real_diagonal(&signs), kappa: q }
    }

    pub fn diagonal(signs: &[i8]) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("signature entries must be ±1".into()));
        }
        let vals: Vec<T> = signs.iter().map(|&s| lit(s as f64)).collect();
        let kappa = signs.iter().filter(|&&s| s < 0).count();
        Ok(Self { j: linalg::from_real_diagonal(&vals), kappa })
    }

    /// Anti-diagonal ones; negative inertia `⌊n/2⌋`.
    pub fn flip(n: usize) -> Self {
        let mut j = CMat::zeros(n, n);
        for i in 0..n {
            j[(i, n - 1 - i)] = real(T::one());
        }
        Self { j, kappa: n / 2 }
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn inertia(&self) -> Inertia {
        Inertia::new(self.dim() - self.kappa, 0, self.kappa)
    }

    /// `[x, y] = y* J x`.
    pub fn inner(&self, x: &CMat<T>, y: &CMat<T>) -> CMat<T> {
        y.adjoint() * &self.j * x
    }
}

/// π-adjoint `M^[+] = J M* J`.
pub fn j_adjoint<T: Real>(m: &CMat<T>, metric: &SignatureMetric<T>) -> Result<CMat<T>> {
    let n = metric.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} operator against a metric of dimension {n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(metric.matrix() * m.adjoint() * metric.matrix())
}

/// `‖M − J M* J‖ ≤ tol·‖M‖`.
pub fn is_pi_selfadjoint<T: Real>(m: &CMat<T>, metric: &SignatureMetric<T>, tol: T) -> bool {
    match j_adjoint(m, metric) {
        Ok(adj) => linalg::fro(&(m - adj)) <= tol * linalg::fro(m),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn m2(a: [Complex<f64>; 4]) -> CMat<f64> {
        CMat::from_row_slice(2, 2, &a)
    }

    #[test]
    fn inertia_examples() {
        let d = m2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(inertia(&d, 1e-10).unwrap(), Inertia::new(1, 0, 1));
        let f = m2([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(inertia(&f, 1e-10).unwrap(), Inertia::new(1, 0, 1));
    }

    #[test]
    fn inertia_of_minus_inverse_square_kernel() {
        // N(z, ζ) = (ζ + z̄)/(z̄² ζ²) for V = −1/z²; G[j][k] = N(z_j, z_k).
        let pts = [c(0.0, 1.0), c(0.0, 2.0)];
        let mut g = CMat::zeros(2, 2);
        for j in 0..2 {
            for k in 0..2 {
                let (z, w) = (pts[j].conj(), pts[k]);
                g[(j, k)] = (w + z) / (z * z * w * w);
            }
        }
        // Brute-force 2×2 eigenvalues: trace and determinant.
        let tr = (g[(0, 0)] + g[(1, 1)]).re;
        let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
        let disc = (tr * tr - 4.0 * det).sqrt();
        assert!((tr - disc) / 2.0 < 0.0 && (tr + disc) / 2.0 > 0.0);
        assert_eq!(inertia(&g, 1e-10).unwrap(), Inertia::new(1, 0, 1));
    }

    #[test]
    fn inertia_rejects_non_hermitian() {
        let m = m2([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(inertia(&m, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn adjoint_examples() {
        let m = m2([c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(0.0, 4.0)]);
        let id = SignatureMetric::<f64>::identity(2);
        assert_eq!(j_adjoint(&m, &id).unwrap(), m.adjoint());

        let flip = SignatureMetric::<f64>::flip(2);
        let n = m2([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(j_adjoint(&n, &flip).unwrap(), n);

        let sig = SignatureMetric::<f64>::standard(1, 1);
        let d = m2([c(1.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(-3.0, 0.5)]);
        let expected = m2([c(1.0, -2.0), c(0.0, 0.0), c(0.0, 0.0), c(-3.0, -0.5)]);
        assert_eq!(j_adjoint(&d, &sig).unwrap(), expected);
    }

    #[test]
    fn selfadjoint_examples() {
        let flip = SignatureMetric::<f64>::flip(2);
        let d = m2([c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        assert!(is_pi_selfadjoint(&d, &flip, 1e-12));
        let h = m2([c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(-1.0, 0.0)]);
        assert!(is_pi_selfadjoint(&h, &SignatureMetric::identity(2), 1e-12));
        let n = m2([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(!is_pi_selfadjoint(&n, &SignatureMetric::identity(2), 1e-12));
    }

    #[test]
    fn metric_validation() {
        assert_eq!(SignatureMetric::<f64>::flip(3).kappa(), 1);
        let bad = m2([c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(SignatureMetric::new(bad).is_err());
        let ok = SignatureMetric::new(SignatureMetric::<f64>::flip(4).matrix().clone()).unwrap();
        assert_eq!(ok.inertia(), Inertia::new(2, 0, 2));
    }
}
