//! Finite-dimensional colligations `(H, K, 𝒥)` on a Pontryagin state space,
//! their transfer and impedance functions, and block-operator builders.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indefinite::{self, SignatureMetric};
use crate::linalg::{self, CMat};
use crate::scalar::{imag_unit, lit, real, to_f64, Real};

/// State operator `H`, channel `K: E → state`, state metric `J` and direction
/// metric `𝒥` on `E`, with `H − H^[+] = 2i K 𝒥 K⁺` and `K⁺ = K* J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Colligation<T: Real> {
    metric: SignatureMetric<T>,
    h_full: CMat<T>,
    k: CMat<T>,
    jdir: SignatureMetric<T>,
}

/// Outcome of [`Colligation::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    /// `‖(H − H^[+]) − 2i K 𝒥 K⁺‖ / max(1, ‖H‖)`.
    pub identity_residual: f64,
    /// `σ_min(K) / σ_max(K)`; zero when `K` has a kernel.
    pub k_margin: f64,
    pub passes: bool,
}

/// Outcome of [`Colligation::minimality_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimality {
    pub minimal: bool,
    pub rank: usize,
    pub n: usize,
    pub singular_values: Vec<f64>,
}

impl<T: Real> Colligation<T> {
    pub fn new(metric: SignatureMetric<T>, h_full: CMat<T>, k: CMat<T>, jdir: SignatureMetric<T>) -> Result<Self> {
        let n = metric.dim();
        if h_full.nrows() != n || h_full.ncols() != n {
            return Err(Error::Dimension(format!("state operator must be {n}x{n}")));
        }
        if k.nrows() != n || k.ncols() != jdir.dim() {
            return Err(Error::Dimension(format!(
                "channel map is {}x{}, expected {n}x{}",
                k.nrows(),
                k.ncols(),
                jdir.dim()
            )));
        }
        Ok(Self { metric, h_full, k, jdir })
    }

    /// Build from the real part: `H = H_R + i K 𝒥 K⁺`.
    pub fn from_real_part(metric: SignatureMetric<T>, h_r: CMat<T>, k: CMat<T>, jdir: SignatureMetric<T>) -> Result<Self> {
        let k_plus = k.adjoint() * metric.matrix();
        let h_i = &k * jdir.matrix() * k_plus;
        Self::new(metric, h_r + h_i * imag_unit::<T>(), k, jdir)
    }

    pub fn n(&self) -> usize {
        self.metric.dim()
    }

    pub fn m(&self) -> usize {
        self.jdir.dim()
    }

    pub fn metric(&self) -> &SignatureMetric<T> {
        &self.metric
    }

    pub fn h_full(&self) -> &CMat<T> {
        &self.h_full
    }

    pub fn k(&self) -> &CMat<T> {
        &self.k
    }

    pub fn jdir(&self) -> &SignatureMetric<T> {
        &self.jdir
    }

    /// `K⁺ = K* J`, the adjoint of `K: (E, ⟨·,·⟩) → (state, [·,·])`.
    pub fn k_plus(&self) -> CMat<T> {
        self.k.adjoint() * self.metric.matrix()
    }

    pub fn h_adjoint(&self) -> CMat<T> {
        self.metric.matrix() * self.h_full.adjoint() * self.metric.matrix()
    }

    /// `H_R = (H + H^[+])/2`.
    pub fn h_real(&self) -> CMat<T> {
        (&self.h_full + self.h_adjoint()) * real(lit::<T>(0.5))
    }

    /// `H_I = (H − H^[+])/2i`.
    pub fn h_imag(&self) -> CMat<T> {
        (&self.h_full - self.h_adjoint()) / Complex::new(T::zero(), lit::<T>(2.0))
    }

    pub fn validate(&self, tol: T) -> Validation {
        let lhs = &self.h_full - self.h_adjoint();
        let rhs = &self.k * self.jdir.matrix() * self.k_plus() * Complex::new(T::zero(), lit::<T>(2.0));
        let scale = T::one().max(linalg::fro(&self.h_full));
        let identity_residual = to_f64(linalg::fro(&(lhs - rhs)) / scale);
        let sv = linalg::singular_values(&self.k);
        let k_margin = match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if hi > T::zero() && sv.len() == self.m() => to_f64(lo / hi),
            _ => 0.0,
        };
        let passes = identity_residual <= to_f64(tol) && k_margin > 1e-12;
        Validation { identity_residual, k_margin, passes }
    }

    fn resolvent_apply(&self, op: &CMat<T>, z: Complex<T>, rhs: &CMat<T>) -> Result<CMat<T>> {
        let shifted = op - linalg::identity::<T>(self.n()) * z;
        linalg::solve(&shifted, rhs, linalg::default_rcond()).ok_or_else(|| Error::resolvent(z))
    }

    /// `W(z) = I − 2i K⁺ (H − z)⁻¹ K 𝒥`.
    pub fn transfer_w(&self, z: Complex<T>) -> Result<CMat<T>> {
        let x = self.resolvent_apply(&self.h_full, z, &(&self.k * self.jdir.matrix()))?;
        let two_i = Complex::new(T::zero(), lit::<T>(2.0));
        Ok(linalg::identity::<T>(self.m()) - self.k_plus() * x * two_i)
    }

    /// `V(z) = K⁺ (H_R − z)⁻¹ K`.
    pub fn impedance_v(&self, z: Complex<T>) -> Result<CMat<T>> {
        let x = self.resolvent_apply(&self.h_real(), z, &self.k)?;
        Ok(self.k_plus() * x)
    }

    /// `Γ_z = (H_R − z)⁻¹ K`.
    pub fn gamma(&self, z: Complex<T>) -> Result<CMat<T>> {
        self.resolvent_apply(&self.h_real(), z, &self.k)
    }

    /// `‖V(z) − i(W(z) + I)⁻¹(W(z) − I)𝒥‖` with the scale `max(1, ‖V(z)‖)`.
    pub fn cayley(&self, z: Complex<T>) -> Result<(T, T)> {
        let v = self.impedance_v(z)?;
        let w = self.transfer_w(z)?;
        let id = linalg::identity::<T>(self.m());
        let wp = &w + &id;
        let wm = &w - &id;
        let rhs = linalg::solve(&wp, &wm, linalg::default_rcond())
            .ok_or_else(|| Error::Domain(format!("W(z) + I is singular at z = {}", crate::scalar::format_complex(crate::scalar::to_c64(z)))))?
            * self.jdir.matrix()
            * imag_unit::<T>();
        Ok((linalg::fro(&(&v - rhs)), T::one().max(linalg::fro(&v))))
    }

    /// Rank of `[(H_R − z₁)⁻¹K | … | (H_R − z_r)⁻¹K]`, threshold `1e-10·σ_max`.
    pub fn minimality_check(&self, probes: &[Complex<T>]) -> Result<Minimality> {
        let (n, m) = (self.n(), self.m());
        if m == 0 || probes.len() < n.div_ceil(m) {
            return Err(Error::Inconclusive(format!(
                "{} probe points for state dimension {n} and {m} channels",
                probes.len()
            )));
        }
        let mut cols = CMat::zeros(n, probes.len() * m);
        for (i, &z) in probes.iter().enumerate() {
            cols.view_mut((0, i * m), (n, m)).copy_from(&self.gamma(z)?);
        }
        let sv = linalg::singular_values(&cols);
        let rank = linalg::rank(&cols, lit(1e-10));
        Ok(Minimality {
            minimal: rank == n,
            rank,
            n,
            singular_values: sv.into_iter().map(to_f64).collect(),
        })
    }

    /// Is `H_R` selfadjoint in the state metric?
    pub fn real_part_is_selfadjoint(&self, tol: T) -> bool {
        indefinite::is_pi_selfadjoint(&self.h_real(), &self.metric, tol)
    }

    /// Direct sum with an uncoupled state of the given signature.
    pub fn with_uncoupled_state(&self, eigenvalue: Complex<T>, sign: i8) -> Result<Self> {
        let n = self.n();
        let metric = {
            let mut j = CMat::zeros(n + 1, n + 1);
            j.view_mut((0, 0), (n, n)).copy_from(self.metric.matrix());
            j[(n, n)] = real(lit::<T>(sign as f64));
            SignatureMetric::new(j)?
        };
        let mut h = CMat::zeros(n + 1, n + 1);
        h.view_mut((0, 0), (n, n)).copy_from(&self.h_full);
        h[(n, n)] = eigenvalue;
        let mut k = CMat::zeros(n + 1, self.m());
        k.view_mut((0, 0), (n, self.m())).copy_from(&self.k);
        Self::new(metric, h, k, self.jdir.clone())
    }
}

/// General 2×2 block operator `[[A, C], [B, D]]` with square diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<T: Real> {
    pub a: CMat<T>,
    pub b: CMat<T>,
    pub c: CMat<T>,
    pub d: CMat<T>,
}

/// The four blocks of `(T − z)⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockResolvent<T: Real> {
    pub r11: CMat<T>,
    pub r12: CMat<T>,
    pub r21: CMat<T>,
    pub r22: CMat<T>,
}

impl<T: Real> BlockResolvent<T> {
    pub fn assemble(&self) -> CMat<T> {
        let (n0, p) = (self.r11.nrows(), self.r22.nrows());
        let mut m = CMat::zeros(n0 + p, n0 + p);
        m.view_mut((0, 0), (n0, n0)).copy_from(&self.r11);
        m.view_mut((0, n0), (n0, p)).copy_from(&self.r12);
        m.view_mut((n0, 0), (p, n0)).copy_from(&self.r21);
        m.view_mut((n0, n0), (p, p)).copy_from(&self.r22);
        m
    }
}

impl<T: Real> BlockMatrix<T> {
    pub fn new(a: CMat<T>, b: CMat<T>, c: CMat<T>, d: CMat<T>) -> Result<Self> {
        let (n0, p) = (a.nrows(), d.nrows());
        if a.ncols() != n0 || d.ncols() != p || b.shape() != (p, n0) || c.shape() != (n0, p) {
            return Err(Error::Dimension("inconsistent block shapes".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn assemble(&self) -> CMat<T> {
        let (n0, p) = (self.a.nrows(), self.d.nrows());
        let mut m = CMat::zeros(n0 + p, n0 + p);
        m.view_mut((0, 0), (n0, n0)).copy_from(&self.a);
        m.view_mut((0, n0), (n0, p)).copy_from(&self.c);
        m.view_mut((n0, 0), (p, n0)).copy_from(&self.b);
        m.view_mut((n0, n0), (p, p)).copy_from(&self.d);
        m
    }
}

/// Schur–Frobenius block inverse of `T − z` through `X(z) = D − z − B(A − z)⁻¹C`.
pub fn schur_resolvent<T: Real>(t: &BlockMatrix<T>, z: Complex<T>) -> Result<BlockResolvent<T>> {
    let (n0, p) = (t.a.nrows(), t.d.nrows());
    let rc = linalg::default_rcond::<T>();
    let az = &t.a - linalg::identity::<T>(n0) * z;
    let az_inv = linalg::inverse(&az, rc).ok_or_else(|| Error::resolvent(z))?;
    let x = &t.d - linalg::identity::<T>(p) * z - &t.b * &az_inv * &t.c;
    let x_inv = linalg::inverse(&x, rc).ok_or_else(|| {
        let w = crate::scalar::to_c64(z);
        Error::SchurComplement { re: w.re, im: w.im }
    })?;
    let ac = &az_inv * &t.c;
    let ba = &t.b * &az_inv;
    Ok(BlockResolvent {
        r11: &az_inv + &ac * &x_inv * &ba,
        r12: -(&ac * &x_inv),
        r21: -(&x_inv * &ba),
        r22: x_inv,
    })
}

/// Block operator `T = [[A₀, −B*], [B, D]]` with `Im D = −I` on the metric
/// `diag(I, −I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem<T: Real> {
    pub a0: CMat<T>,
    pub b: CMat<T>,
    /// Hermitian part of `D`.
    pub d_re: CMat<T>,
}

/// Build the block system from Hermitian `A₀`, `D` and a coupling `B`.
pub fn schur_build<T: Real>(a0: CMat<T>, b: CMat<T>, d_re: CMat<T>) -> Result<BlockSystem<T>> {
    let (n0, p) = (a0.nrows(), d_re.nrows());
    if a0.ncols() != n0 || d_re.ncols() != p || b.shape() != (p, n0) {
        return Err(Error::Dimension("A0 is n0 x n0, B is p x n0, D is p x p".into()));
    }
    let tol = lit::<T>(1e-12);
    if linalg::hermitian_defect(&a0) > tol || linalg::hermitian_defect(&d_re) > tol {
        return Err(Error::Domain("A0 and D must be Hermitian".into()));
    }
    Ok(BlockSystem { a0, b, d_re })
}

impl<T: Real> BlockSystem<T> {
    pub fn n0(&self) -> usize {
        self.a0.nrows()
    }

    pub fn p(&self) -> usize {
        self.d_re.nrows()
    }

    /// `T` with `D = Re D − iI`.
    pub fn block_matrix(&self) -> BlockMatrix<T> {
        let d = &self.d_re - linalg::identity::<T>(self.p()) * imag_unit::<T>();
        BlockMatrix { a: self.a0.clone(), b: self.b.clone(), c: -self.b.adjoint(), d }
    }

    /// `T_R`: the same blocks with `D` replaced by `Re D`.
    pub fn real_block_matrix(&self) -> BlockMatrix<T> {
        BlockMatrix { a: self.a0.clone(), b: self.b.clone(), c: -self.b.adjoint(), d: self.d_re.clone() }
    }

    pub fn metric(&self) -> SignatureMetric<T> {
        SignatureMetric::standard(self.n0(), self.p())
    }

    /// The colligation with `K = [0; I]` and `𝒥 = I`.
    pub fn colligation(&self) -> Result<Colligation<T>> {
        let (n0, p) = (self.n0(), self.p());
        let mut k = CMat::zeros(n0 + p, p);
        k.view_mut((n0, 0), (p, p)).copy_from(&linalg::identity::<T>(p));
        Colligation::new(self.metric(), self.block_matrix().assemble(), k, SignatureMetric::identity(p))
    }

    /// `X_{T_R}(z) = Re D + B(A₀ − z)⁻¹B* − z`.
    pub fn x(&self, z: Complex<T>) -> Result<CMat<T>> {
        let az = &self.a0 - linalg::identity::<T>(self.n0()) * z;
        let sol = linalg::solve(&az, &self.b.adjoint(), linalg::default_rcond()).ok_or_else(|| Error::resolvent(z))?;
        Ok(&self.d_re + &self.b * sol - linalg::identity::<T>(self.p()) * z)
    }

    /// `V(z) = −X_{T_R}(z)⁻¹`.
    pub fn impedance(&self, z: Complex<T>) -> Result<CMat<T>> {
        let x = self.x(z)?;
        let inv = linalg::inverse(&x, linalg::default_rcond()).ok_or_else(|| Error::pole(z))?;
        Ok(-inv)
    }
}

/// Gauss–Chebyshev nodes and weights of the second kind for the weight
/// `(2/π)√(1 − t²)` on `[−1, 1]`; the weights sum to one.
pub fn chebyshev2<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let h = T::pi() / lit::<T>(n as f64 + 1.0);
    let scale = lit::<T>(2.0) / lit::<T>(n as f64 + 1.0);
    (1..=n)
        .map(|k| {
            let th = h * lit::<T>(k as f64);
            (th.cos(), scale * th.sin() * th.sin())
        })
        .unzip()
}

/// Quadrature discretization of the closed-form Example 2 function:
/// `A₀ = diag(t_k)`, `B = γ(√w_k)`, `D = d`.
pub fn example2_system<T: Real>(gamma: T, d: T, nodes: usize) -> Result<BlockSystem<T>> {
    let (t, w) = chebyshev2::<T>(nodes);
    let a0 = linalg::from_real_diagonal(&t);
    let b = CMat::from_iterator(1, nodes, w.iter().map(|&wk| real(gamma * wk.sqrt())));
    schur_build(a0, b, linalg::scalar_matrix(real(d)))
}
