//! Minimal colligations realizing rational generalized Nevanlinna functions:
//! the reproducing-kernel construction, a partial-fraction oracle and a
//! round-trip verifier.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::indefinite::SignatureMetric;
use crate::kernel::{self, KernelConfig};
use crate::linalg::{self, CMat};
use crate::ratfun::{MatrixFunction, PoleTerm};
use crate::scalar::{cabs, csqrt, format_complex, lit, real, to_c64, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizeConfig {
    /// Largest accepted condition number of the state Gram matrix.
    pub cond_max: f64,
    /// Number of resampling attempts after the first.
    pub retries: usize,
    /// Relative tolerance of the channel consistency check.
    pub consistency_tol: f64,
}

impl Default for RealizeConfig {
    fn default() -> Self {
        Self { cond_max: 1e10, retries: 5, consistency_tol: 1e-8 }
    }
}

/// Intermediate data of the kernel construction, in difference coordinates.
#[derive(Debug, Clone)]
pub struct RKModel<T: Real> {
    pub sample_points: Vec<Complex<T>>,
    /// Block kernel Gram over the sample points, `(n+1)m` square for `m` directions.
    pub gram: CMat<T>,
    /// Selected difference vectors as `(point index ≥ 1, direction)`.
    pub basis: Vec<(usize, usize)>,
    pub state_metric: CMat<T>,
    /// `[d_k, A_V d_l]`, Hermitian since `A_V` is selfadjoint.
    pub shift_gram: CMat<T>,
    /// `[d_k, K e_a]`.
    pub channel_gram: CMat<T>,
    pub av: CMat<T>,
    pub kmat: CMat<T>,
    pub condition: f64,
    /// Largest relative mismatch of `(A_V − z_j)γ(z_j)` against the channel.
    pub consistency: f64,
}

/// State dimension of a minimal realization.
pub fn mcmillan_degree<T: Real>(v: &MatrixFunction<T>) -> Result<usize> {
    match v {
        MatrixFunction::Rational(_) => {
            require_realizable(v)?;
            if let Some(f) = v.as_scalar_rational() {
                return Ok(f.den().degree());
            }
            let terms = v.partial_fractions()?;
            Ok(terms.iter().map(local_degree).sum())
        }
        MatrixFunction::BlockDiag(blocks) => blocks.iter().map(mcmillan_degree).sum(),
        MatrixFunction::Builtin(_) => {
            let est = kernel::kernel_rank(v, &KernelConfig::default())?;
            if est.stabilized {
                Ok(est.rank)
            } else {
                Err(Error::Inconclusive(format!("kernel rank did not stabilize: {:?}", est.history)))
            }
        }
    }
}

/// Rank of the block Hankel matrix of the principal part.
fn local_degree<T: Real>(term: &PoleTerm<T>) -> usize {
    let k = term.order;
    let m = term.coefficients.first().map_or(0, |c| c.nrows());
    let mut h = CMat::zeros(k * m, k * m);
    for i in 0..k {
        for j in 0..k - i {
            h.view_mut((i * m, j * m), (m, m)).copy_from(&term.coefficients[i + j]);
        }
    }
    linalg::rank(&h, lit(1e-10))
}

fn require_realizable<T: Real>(v: &MatrixFunction<T>) -> Result<()> {
    let MatrixFunction::Rational(r) = v else {
        return Err(Error::Unsupported("finite-dimensional realization needs rational data".into()));
    };
    if !v.symmetry_check() {
        return Err(Error::Domain("V is not real-symmetric".into()));
    }
    if r.entries().iter().any(|f| !f.is_strictly_proper()) {
        return Err(Error::Domain("V is not strictly proper".into()));
    }
    if r.entries().iter().all(|f| f.is_zero()) {
        return Err(Error::Domain("V vanishes identically".into()));
    }
    if r.dim() > 1 && !kernel::strictness_default(v, &KernelConfig::default())? {
        return Err(Error::Domain("kernel has a common null direction".into()));
    }
    Ok(())
}

/// `M = S* J S` with `S = |Λ|^{1/2} U*`; returns `(J, S, S⁻¹)`.
fn signature_form<T: Real>(m: &CMat<T>) -> Result<(SignatureMetric<T>, CMat<T>, CMat<T>)> {
    let (vals, u) = linalg::hermitian_eigen(m);
    let top = vals.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    if vals.iter().any(|&x| x.abs() <= top * lit(1e-14)) {
        return Err(Error::Conditioning("state Gram matrix is singular".into()));
    }
    let signs: Vec<i8> = vals.iter().map(|&x| if x < T::zero() { -1 } else { 1 }).collect();
    let root: Vec<T> = vals.iter().map(|x| x.abs().sqrt()).collect();
    let inv_root: Vec<T> = root.iter().map(|&r| T::one() / r).collect();
    let s = linalg::from_real_diagonal(&root) * u.adjoint();
    let s_inv = &u * linalg::from_real_diagonal(&inv_root);
    Ok((SignatureMetric::diagonal(&signs)?, s, s_inv))
}

/// Pick `count` well-separated columns by pivoted Gram–Schmidt.
fn select_columns<T: Real>(a: &CMat<T>, count: usize) -> Vec<usize> {
    let mut work = a.clone();
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count.min(a.ncols()) {
        let best = (0..work.ncols())
            .filter(|j| !chosen.contains(j))
            .max_by(|&x, &y| work.column(x).norm().partial_cmp(&work.column(y).norm()).unwrap_or(std::cmp::Ordering::Equal));
        let Some(p) = best else { break };
        let nrm = work.column(p).norm();
        if nrm == T::zero() {
            break;
        }
        let q = work.column(p) / real(nrm);
        for j in 0..work.ncols() {
            if j != p && !chosen.contains(&j) {
                let proj = q.dotc(&work.column(j));
                let upd = work.column(j) - &q * proj;
                work.set_column(j, &upd);
            }
        }
        chosen.push(p);
    }
    chosen.sort_unstable();
    chosen
}

/// Real window `[lo, hi]` covering `Re p ± |Im p|` over the poles `p`, so the
/// sampling line sits at a height comparable to the distance to every pole.
fn spectral_window<T: Real>(v: &MatrixFunction<T>) -> (f64, f64) {
    let MatrixFunction::Rational(r) = v else { return (-1.0, 1.0) };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for f in r.entries() {
        for z in f.den().roots().unwrap_or_default() {
            let (x, y) = (to_f64(z.re), to_f64(z.im).abs());
            lo = lo.min(x - y);
            hi = hi.max(x + y);
        }
    }
    if lo > hi {
        (-1.0, 1.0)
    } else {
        (lo, hi)
    }
}

/// `count` equally spaced points on `Im z = h` spanning the window with a
/// margin of a quarter of its width; `h` is a quarter of the width. Each
/// retry shifts the points along the line and raises it.
fn sample_line<T: Real>(window: (f64, f64), count: usize, attempt: usize) -> Vec<Complex<T>> {
    let width = (window.1 - window.0).max(1.0);
    let (lo, hi) = (window.0 - 0.25 * width, window.1 + 0.25 * width);
    let h = 0.25 * width * 1.3_f64.powi(attempt as i32);
    let shift = 0.5 + 0.618_033_988_75 * attempt as f64;
    (0..count)
        .map(|j| {
            let x = lo + (hi - lo) * ((j as f64 + shift.fract()) / count as f64);
            Complex::new(lit(x), lit(h))
        })
        .collect()
}

/// Kernel construction on a single set of sample points.
pub fn rk_model<T: Real>(v: &MatrixFunction<T>, points: &[Complex<T>], n: usize) -> Result<RKModel<T>> {
    let m = v.dim();
    let p = points.len();
    if p < 2 || (p - 1) * m < n {
        return Err(Error::Dimension(format!("{p} points cannot span a state space of dimension {n}")));
    }
    let values: Vec<CMat<T>> = points.iter().map(|&z| v.eval(z)).collect::<Result<_>>()?;
    let gram = kernel::block_gram(v, points)?;
    let nd = (p - 1) * m;
    // Column (j−1)m + a of L is the difference γ_{j,a} − γ_{0,a}.
    let mut l = CMat::zeros(p * m, nd);
    for j in 1..p {
        for a in 0..m {
            l[(j * m + a, (j - 1) * m + a)] = real(T::one());
            l[(a, (j - 1) * m + a)] = real(-T::one());
        }
    }
    let gd = linalg::hermitian_part(&(l.adjoint() * &gram * &l));
    let scale: Vec<T> = (0..nd)
        .map(|i| {
            let r = gd.row(i).norm();
            if r > T::zero() { T::one() / r.sqrt() } else { T::one() }
        })
        .collect();
    let ds = linalg::from_real_diagonal(&scale);
    let gs = &ds * &gd * &ds;
    // W selects n of the scaled differences.
    let (w, sel) = if nd == n {
        (linalg::identity::<T>(n), (0..n).collect::<Vec<_>>())
    } else {
        let sel = select_columns(&gs, n);
        if sel.len() < n {
            return Err(Error::Conditioning(format!("difference vectors span only {} dimensions", sel.len())));
        }
        let mut w = CMat::zeros(nd, n);
        for (c, &k) in sel.iter().enumerate() {
            w[(k, c)] = real(T::one());
        }
        (w, sel)
    };
    let dw = &ds * &w;
    let ls = &l * &dw;
    let metric = linalg::hermitian_part(&(ls.adjoint() * &gram * &ls));
    let sv = linalg::singular_values(&metric);
    let condition = match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => to_f64(hi / lo),
        _ => f64::INFINITY,
    };
    let lsg = ls.adjoint() * &gram;
    let coords = |rhs: &CMat<T>| -> Result<CMat<T>> {
        linalg::solve(&metric, &(&lsg * rhs), lit(1e-300))
            .ok_or_else(|| Error::Conditioning("state Gram matrix is singular".into()))
    };
    // A_V maps γ_{j,a} − γ_{0,a} to z_j γ_{j,a} − z_0 γ_{0,a};
    // [γ_{j,b} − γ_{0,b}, K e_a] = (V(z_j)* − V(z_0)*)[b, a].
    let mut y_full = CMat::zeros(p * m, nd);
    let mut b_full = CMat::zeros(nd, m);
    for j in 1..p {
        let diff = values[j].adjoint() - values[0].adjoint();
        for bb in 0..m {
            let k = (j - 1) * m + bb;
            y_full[(j * m + bb, k)] = points[j];
            y_full[(bb, k)] = -points[0];
            for a in 0..m {
                b_full[(k, a)] = diff[(bb, a)];
            }
        }
    }
    let y = &y_full * &dw;
    let shift_gram = linalg::hermitian_part(&(&lsg * &y));
    let av = coords(&y)?;
    let b = dw.adjoint() * &b_full;
    let kmat = linalg::solve(&metric, &b, lit(1e-300))
        .ok_or_else(|| Error::Conditioning("state Gram matrix is singular".into()))?;
    let knorm = T::one().max(linalg::fro(&kmat));
    let mut consistency = T::zero();
    for (j, &z) in points.iter().enumerate() {
        let gj = coords(&CMat::identity(p * m, p * m).columns(j * m, m).into_owned())?;
        let lhs = (&av - linalg::identity::<T>(n) * z) * gj;
        consistency = consistency.max(linalg::fro(&(lhs - &kmat)) / knorm);
    }
    Ok(RKModel {
        sample_points: points.to_vec(),
        gram,
        basis: sel.iter().map(|&k| (k / m + 1, k % m)).collect(),
        state_metric: metric,
        shift_gram,
        channel_gram: b,
        av,
        kmat,
        condition,
        consistency: to_f64(consistency),
    })
}

/// Convert model coordinates to a colligation with a signature metric.
///
/// With `M = S*JS` the state operator is `S A_V S⁻¹ = J S⁻* [d, A_V d] S⁻¹`
/// and the channel is `J S⁻* [d, K]`, so `M` is never inverted explicitly.
pub fn model_colligation<T: Real>(model: &RKModel<T>) -> Result<Colligation<T>> {
    let (metric, s, _) = signature_form(&model.state_metric)?;
    let s_inv_adj = linalg::inverse(&s, lit(1e-300))
        .ok_or_else(|| Error::Conditioning("state Gram matrix is singular".into()))?
        .adjoint();
    let j = metric.matrix();
    let h_r = j * linalg::hermitian_part(&(&s_inv_adj * &model.shift_gram * s_inv_adj.adjoint()));
    let k = j * &s_inv_adj * &model.channel_gram;
    let m = k.ncols();
    Colligation::from_real_part(metric, h_r, k, SignatureMetric::identity(m))
}

/// Realization through the reproducing-kernel model on sample points along a
/// horizontal line over the poles, resampled while the state Gram matrix is
/// ill-conditioned or the channel relation is violated.
pub fn realize_rkps<T: Real>(v: &MatrixFunction<T>, config: &RealizeConfig) -> Result<Colligation<T>> {
    realize_rkps_model(v, config).map(|(c, _)| c)
}

pub fn realize_rkps_model<T: Real>(v: &MatrixFunction<T>, config: &RealizeConfig) -> Result<(Colligation<T>, RKModel<T>)> {
    require_realizable(v)?;
    let n = mcmillan_degree(v)?;
    let m = v.dim();
    let count = n.div_ceil(m) + 1;
    let window = spectral_window(v);
    let mut history = Vec::new();
    for attempt in 0..=config.retries {
        let points = sample_line::<T>(window, count, attempt);
        let outcome = rk_model(v, &points, n).and_then(|model| {
            if model.condition > config.cond_max {
                return Err(Error::Conditioning(format!("condition {:.3e}", model.condition)));
            }
            if model.consistency > config.consistency_tol {
                return Err(Error::Conditioning(format!("channel mismatch {:.3e}", model.consistency)));
            }
            let col = model_colligation(&model)?;
            Ok((col, model))
        });
        match outcome {
            Ok(done) => return Ok(done),
            Err(e) => {
                let pts: Vec<String> = points.iter().map(|&z| format_complex(to_c64(z))).collect();
                log::debug!("realization attempt {attempt} failed: {e}");
                history.push(format!("attempt {attempt} [{}]: {e}", pts.join(", ")));
            }
        }
    }
    Err(Error::Conditioning(format!("no usable sample points; {}", history.join("; "))))
}

/// Hankel metric `G[a][b] = −A_{2k−1−a−b}` (zero-based) of a Jordan block.
fn hankel<T: Real>(coeffs: &[Complex<T>]) -> CMat<T> {
    let k = coeffs.len();
    CMat::from_fn(k, k, |a, b| {
        let s = a + b + 1;
        if s >= k { -coeffs[2 * k - 1 - s] } else { Complex::new(T::zero(), T::zero()) }
    })
}

fn jordan<T: Real>(w: Complex<T>, k: usize) -> CMat<T> {
    CMat::from_fn(k, k, |a, b| {
        if a == b {
            w
        } else if b == a + 1 {
            real(T::one())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Realization assembled from the partial-fraction expansion of a scalar
/// `V`: one Jordan block per real pole and a pair of blocks per conjugate
/// pair of poles.
pub fn pf_realize<T: Real>(v: &MatrixFunction<T>) -> Result<Colligation<T>> {
    if v.dim() != 1 {
        return Err(Error::Dimension("partial-fraction realization is scalar".into()));
    }
    require_realizable(v)?;
    let terms = v.partial_fractions()?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut hs = Vec::new();
    let mut gs = Vec::new();
    let mut ks: Vec<Complex<T>> = Vec::new();
    for t in &terms {
        let coeffs: Vec<Complex<T>> = t.coefficients.iter().map(|c| c[(0, 0)]).collect();
        let k = coeffs.len();
        let tol = lit::<T>(1e-8) * T::one().max(cabs(t.pole));
        if t.pole.im.abs() <= tol {
            let coeffs: Vec<Complex<T>> = coeffs.iter().map(|c| real(c.re)).collect();
            let pole = real(t.pole.re);
            if k == 1 {
                let a = coeffs[0].re;
                let sign = if a < T::zero() { T::one() } else { -T::one() };
                hs.push(linalg::scalar_matrix(pole));
                gs.push(linalg::scalar_matrix(real(sign)));
                ks.push(real(a.abs().sqrt()));
            } else {
                hs.push(jordan(pole, k));
                gs.push(hankel(&coeffs));
                ks.extend((0..k).map(|i| if i + 1 == k { real(T::one()) } else { zero }));
            }
        } else if t.pole.im > T::zero() {
            let w = t.pole;
            let mut h = CMat::zeros(2 * k, 2 * k);
            h.view_mut((0, 0), (k, k)).copy_from(&jordan(w, k));
            h.view_mut((k, k), (k, k)).copy_from(&jordan(w.conj(), k));
            let mut g = CMat::zeros(2 * k, 2 * k);
            if k == 1 {
                g[(0, 1)] = real(T::one());
                g[(1, 0)] = real(T::one());
                let s = csqrt(-coeffs[0]);
                ks.push(s);
                ks.push(s.conj());
            } else {
                let q = hankel(&coeffs);
                g.view_mut((k, 0), (k, k)).copy_from(&q);
                g.view_mut((0, k), (k, k)).copy_from(&q.adjoint());
                for _ in 0..2 {
                    ks.extend((0..k).map(|i| if i + 1 == k { real(T::one()) } else { zero }));
                }
            }
            hs.push(h);
            gs.push(g);
        }
    }
    let h = linalg::block_diag(&hs);
    let g = linalg::block_diag(&gs);
    let k = CMat::from_column_slice(ks.len(), 1, &ks);
    let n = g.nrows();
    let involution = linalg::fro(&(&g * &g - linalg::identity::<T>(n))) <= lit(1e-12) && linalg::hermitian_defect(&g) == T::zero();
    if involution {
        return Colligation::from_real_part(SignatureMetric::new(g)?, h, k, SignatureMetric::identity(1));
    }
    let (metric, s, s_inv) = signature_form(&g)?;
    let h = &s * h * &s_inv;
    let j = metric.matrix();
    let h_r = (&h + j * h.adjoint() * j) * real(lit::<T>(0.5));
    Colligation::from_real_part(metric, h_r, &s * k, SignatureMetric::identity(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub max_impedance_error: f64,
    /// Point of the largest impedance error as `[re, im]`.
    pub worst_point: [f64; 2],
    pub kernel_identity_residual: f64,
    pub minimal: bool,
    pub kappa_metric: usize,
    pub kappa_kernel: usize,
    pub kappa_stabilized: bool,
    pub evaluation_failures: usize,
    pub passes: bool,
}

/// Compare a colligation against `V`: impedance at `points`, the kernel
/// identity `Γ_ζ^[+]Γ_z = N_V(ζ, z)` over the first six points, and the
/// negative index of the state metric against the kernel.
///
/// Minimality is reported but does not gate `passes`.
pub fn roundtrip_verify<T: Real>(
    v: &MatrixFunction<T>,
    c: &Colligation<T>,
    points: &[Complex<T>],
    tol: f64,
) -> RoundtripReport {
    let mut failures = 0;
    let mut worst = (0.0_f64, [f64::NAN, f64::NAN]);
    for &z in points {
        match (v.eval(z), c.impedance_v(z)) {
            (Ok(a), Ok(b)) if a.shape() == b.shape() => {
                let na = to_f64(linalg::fro(&a));
                let diff = to_f64(linalg::fro(&(&a - &b)));
                let err = if na > 0.0 { diff / na } else { diff };
                let err = if err.is_finite() { err } else { f64::INFINITY };
                if err >= worst.0 {
                    let w = to_c64(z);
                    worst = (err, [w.re, w.im]);
                }
            }
            _ => failures += 1,
        }
    }
    let grid: Vec<Complex<T>> = points.iter().take(6).copied().collect();
    let mut kernel_residual = 0.0_f64;
    let gammas: Vec<Option<CMat<T>>> = grid.iter().map(|&z| c.gamma(z).ok()).collect();
    for (i, &zeta) in grid.iter().enumerate() {
        for (j, &z) in grid.iter().enumerate() {
            let (Some(gz), Some(gzeta)) = (&gammas[j], &gammas[i]) else {
                failures += 1;
                continue;
            };
            let lhs = gzeta.adjoint() * c.metric().matrix() * gz;
            match kernel::kernel_value(v, zeta, z) {
                Ok(rhs) if lhs.shape() == rhs.shape() => {
                    let r = to_f64(linalg::fro(&(&lhs - &rhs))) / to_f64(T::one().max(linalg::fro(&rhs)));
                    kernel_residual = kernel_residual.max(if r.is_finite() { r } else { f64::INFINITY });
                }
                _ => failures += 1,
            }
        }
    }
    let probes: Vec<Complex<T>> = points.iter().take(c.n().div_ceil(c.m().max(1)).max(6)).copied().collect();
    let minimal = c.minimality_check(&probes).map(|r| r.minimal).unwrap_or(false);
    let (kappa_kernel, kappa_stabilized) = kernel::negative_squares(v, &KernelConfig::default())
        .map(|e| (e.kappa, e.stabilized))
        .unwrap_or((usize::MAX, false));
    let kappa_metric = c.metric().kappa();
    let passes = failures == 0
        && worst.0 <= tol
        && kernel_residual <= tol
        && kappa_stabilized
        && kappa_metric == kappa_kernel;
    RoundtripReport {
        max_impedance_error: worst.0,
        worst_point: worst.1,
        kernel_identity_residual: kernel_residual,
        minimal,
        kappa_metric,
        kappa_kernel,
        kappa_stabilized,
        evaluation_failures: failures,
        passes,
    }
}
