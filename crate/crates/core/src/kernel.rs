//! The Nevanlinna kernel `N_V(z, ζ) = (V(ζ) − V(z)*)/(ζ − z̄)`, its Gram
//! matrices and the number of negative squares.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indefinite::{self, Inertia};
use crate::linalg::{self, CMat, CVec};
use crate::ratfun::MatrixFunction;
use crate::scalar::{cabs, lit, Real};

/// Sampling and tolerance settings shared by the kernel-based estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Number of points in the first grid.
    pub grid_start: usize,
    /// Largest grid tried before giving up.
    pub grid_max: usize,
    pub seed: u64,
    /// Relative eigenvalue threshold; `None` uses `1e-10·dim`.
    pub tol: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { grid_start: 6, grid_max: 192, seed: 0x4E4B, tol: None }
    }
}

/// Hermitian Gram matrix `G[j][k] = h_j* N_V(z_j, z_k) h_k`.
#[derive(Debug, Clone)]
pub struct KernelGram<T: Real> {
    pub points: Vec<Complex<T>>,
    pub directions: Vec<CVec<T>>,
    pub gram: CMat<T>,
    pub inertia: Inertia,
}

/// One grid of the stabilization loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRun {
    pub points: usize,
    pub negative: usize,
    pub rank: usize,
    /// Negative eigenvalues within a factor 100 of the zero threshold.
    pub ambiguous: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub kappa: usize,
    pub stabilized: bool,
    pub history: Vec<GridRun>,
    pub grids_used: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEstimate {
    pub rank: usize,
    pub stabilized: bool,
    pub history: Vec<GridRun>,
}

fn coincident<T: Real>(z: Complex<T>, zeta: Complex<T>) -> bool {
    zeta == z.conj() || cabs(zeta - z.conj()) < lit(1e-12)
}

/// `N_V(z, ζ)`, routed to the derivative `V′(ζ)` when `ζ = z̄`.
pub fn kernel_value<T: Real>(v: &MatrixFunction<T>, z: Complex<T>, zeta: Complex<T>) -> Result<CMat<T>> {
    if coincident(z, zeta) {
        return v.derivative_eval(zeta);
    }
    let a = v.eval(zeta)?;
    let b = v.eval(z)?;
    Ok((a - b.adjoint()) / (zeta - z.conj()))
}

/// Kernel matrices `N_V(z_j, z_k)` for every ordered pair, from one
/// evaluation per point.
pub fn kernel_blocks<T: Real>(v: &MatrixFunction<T>, points: &[Complex<T>]) -> Result<Vec<Vec<CMat<T>>>> {
    let vals = points.iter().map(|&z| v.eval(z)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(points.len());
    for (j, &zj) in points.iter().enumerate() {
        let mut row = Vec::with_capacity(points.len());
        for (k, &zk) in points.iter().enumerate() {
            row.push(if coincident(zj, zk) {
                v.derivative_eval(zk)?
            } else {
                (&vals[k] - vals[j].adjoint()) / (zk - zj.conj())
            });
        }
        out.push(row);
    }
    Ok(out)
}

/// Gram matrix over paired points and directions.
pub fn gram_matrix<T: Real>(
    v: &MatrixFunction<T>,
    points: &[Complex<T>],
    directions: &[CVec<T>],
) -> Result<KernelGram<T>> {
    if points.len() != directions.len() {
        return Err(Error::Dimension(format!(
            "{} points paired with {} directions",
            points.len(),
            directions.len()
        )));
    }
    let d = v.dim();
    if let Some(h) = directions.iter().find(|h| h.len() != d) {
        return Err(Error::Dimension(format!("direction of length {} for a {d}x{d} function", h.len())));
    }
    if directions.iter().any(|h| h.norm() == T::zero()) {
        return Err(Error::Domain("zero direction vector".into()));
    }
    let blocks = kernel_blocks(v, points)?;
    let n = points.len();
    let mut gram = CMat::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            gram[(j, k)] = (directions[j].adjoint() * &blocks[j][k] * &directions[k])[(0, 0)];
        }
    }
    let gram = linalg::hermitian_part(&gram);
    let inertia = indefinite::inertia(&gram, indefinite::default_tol(n))?;
    Ok(KernelGram { points: points.to_vec(), directions: directions.to_vec(), gram, inertia })
}

/// Gram matrix with every standard basis direction at every point:
/// block `(j, k)` is `N_V(z_j, z_k)`.
pub fn block_gram<T: Real>(v: &MatrixFunction<T>, points: &[Complex<T>]) -> Result<CMat<T>> {
    let d = v.dim();
    let blocks = kernel_blocks(v, points)?;
    let n = points.len();
    let mut gram = CMat::zeros(n * d, n * d);
    for j in 0..n {
        for k in 0..n {
            gram.view_mut((j * d, k * d), (d, d)).copy_from(&blocks[j][k]);
        }
    }
    Ok(linalg::hermitian_part(&gram))
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// First `n` points of the sampling stream in `[−5,5] × i[0.1,10]`:
/// Halton lattice points interleaved with seeded uniform points. Every
/// prefix of the stream is itself a prefix of any longer request.
pub fn sample_points<T: Real>(n: usize, seed: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let (x, y) = if k % 2 == 0 {
                let i = (k / 2 + 1) as u64;
                (radical_inverse(i, 2), radical_inverse(i, 3))
            } else {
                (rng.random::<f64>(), rng.random::<f64>())
            };
            Complex::new(lit(-5.0 + 10.0 * x), lit(0.1 + 9.9 * y))
        })
        .collect()
}

/// Stream points at which `V` evaluates to finite values, `n` of them.
fn usable_points<T: Real>(v: &MatrixFunction<T>, n: usize, seed: u64) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(n);
    let mut want = n;
    while out.len() < n {
        want = want * 2 + 8;
        out.clear();
        for z in sample_points::<T>(want, seed) {
            let ok = v
                .eval(z)
                .map(|m| m.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
                .unwrap_or(false);
            if ok {
                out.push(z);
                if out.len() == n {
                    break;
                }
            }
        }
        if want > 64 * n + 1024 {
            break;
        }
    }
    out
}

/// Congruence by the diagonal of inverse square-root row norms; leaves the
/// inertia unchanged and balances entries from points near and far from
/// singularities.
fn balance<T: Real>(g: &CMat<T>) -> CMat<T> {
    let n = g.nrows();
    let s: Vec<T> = (0..n)
        .map(|i| {
            let r = g.row(i).iter().fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt();
            if r > T::zero() {
                T::one() / r.sqrt()
            } else {
                T::one()
            }
        })
        .collect();
    let mut out = g.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= s[i] * s[j];
        }
    }
    out
}

fn grid_run<T: Real>(v: &MatrixFunction<T>, points: &[Complex<T>], tol: Option<f64>) -> Result<GridRun> {
    let g = balance(&block_gram(v, points)?);
    let tol = tol.map_or_else(|| indefinite::default_tol(g.nrows()), lit);
    let rep = indefinite::inertia_report(&g, tol)?;
    let lo = rep.threshold / lit(100.0);
    let hi = rep.threshold * lit(100.0);
    let ambiguous = rep.eigenvalues.iter().filter(|&&e| e < T::zero() && -e > lo && -e <= hi).count();
    Ok(GridRun {
        points: points.len(),
        negative: rep.inertia.n_minus,
        rank: rep.inertia.rank(),
        ambiguous,
    })
}

fn grid_sizes(config: &KernelConfig) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut m = config.grid_start.max(1);
    while m <= config.grid_max.max(config.grid_start) {
        sizes.push(m);
        m *= 2;
    }
    sizes
}

fn stable_by<F: Fn(&GridRun) -> usize>(history: &[GridRun], key: F) -> bool {
    history.len() >= 3 && {
        let tail = &history[history.len() - 3..];
        tail.iter().all(|r| r.ambiguous == 0 && key(r) == key(&tail[0]))
    }
}

fn describe(config: &KernelConfig) -> String {
    format!(
        "nested grids {:?} in [-5,5]x[0.1,10]i, Halton/ChaCha seed {:#x}, all basis directions per point",
        grid_sizes(config),
        config.seed
    )
}

/// Negative squares of the kernel over doubling grids, stopping once three
/// consecutive unambiguous grids agree.
pub fn negative_squares<T: Real>(v: &MatrixFunction<T>, config: &KernelConfig) -> Result<KappaEstimate> {
    if !v.symmetry_check() {
        return Err(Error::Domain("negative squares require V(conj z) = V(z)*".into()));
    }
    let sizes = grid_sizes(config);
    let all = usable_points(v, *sizes.last().unwrap_or(&0), config.seed);
    let mut history = Vec::new();
    for &m in &sizes {
        let m = m.min(all.len());
        history.push(grid_run(v, &all[..m], config.tol)?);
        if stable_by(&history, |r| r.negative) {
            break;
        }
    }
    let stabilized = stable_by(&history, |r| r.negative);
    let kappa = history.last().map_or(0, |r| r.negative);
    if !stabilized {
        log::warn!("negative-square count did not stabilize: {history:?}");
    }
    Ok(KappaEstimate { kappa, stabilized, history, grids_used: describe(config) })
}

/// Stabilized rank of the kernel Gram matrices.
pub fn kernel_rank<T: Real>(v: &MatrixFunction<T>, config: &KernelConfig) -> Result<RankEstimate> {
    if !v.symmetry_check() {
        return Err(Error::Domain("kernel rank requires a symmetric function".into()));
    }
    let sizes = grid_sizes(config);
    let all = usable_points(v, *sizes.last().unwrap_or(&0), config.seed);
    let mut history = Vec::new();
    for &m in &sizes {
        let m = m.min(all.len());
        let mut run = grid_run(v, &all[..m], config.tol)?;
        run.ambiguous = 0;
        history.push(run);
        if stable_by(&history, |r| r.rank) {
            break;
        }
    }
    let stabilized = stable_by(&history, |r| r.rank);
    Ok(RankEstimate { rank: history.last().map_or(0, |r| r.rank), stabilized, history })
}

/// Trivial common null space of the kernel matrices over all point pairs.
pub fn strictness_check<T: Real>(v: &MatrixFunction<T>, points: &[Complex<T>]) -> Result<bool> {
    let d = v.dim();
    let blocks = kernel_blocks(v, points)?;
    let rows = points.len() * points.len() * d;
    if rows < d {
        return Err(Error::Inconclusive("not enough sample pairs for the strictness test".into()));
    }
    let mut stack = CMat::zeros(rows, d);
    let mut r = 0;
    for row in &blocks {
        for b in row {
            stack.view_mut((r, 0), (d, d)).copy_from(b);
            r += d;
        }
    }
    let sv = linalg::singular_values(&stack);
    let smax = sv.first().copied().unwrap_or_else(T::zero);
    let smin = sv.last().copied().unwrap_or_else(T::zero);
    Ok(smax > T::min_value().unwrap_or(T::zero()) && smin > lit::<T>(1e-10) * smax)
}

/// Strictness with the first `max(8, dim)` stream points.
pub fn strictness_default<T: Real>(v: &MatrixFunction<T>, config: &KernelConfig) -> Result<bool> {
    let pts = usable_points(v, v.dim().max(8), config.seed);
    strictness_check(v, &pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = MatrixFunction<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn minus_inv() -> F {
        F::scalar_real(&[-1.0], &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn kernel_value_examples() {
        let v = minus_inv();
        let k = kernel_value(&v, c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!((k[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        let k = kernel_value(&v, c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        assert!((k[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        // Agrees with 1/(z̄ζ) there.
        let formula = c(1.0, 0.0) / (c(0.0, 1.0).conj() * c(0.0, -1.0));
        assert!((k[(0, 0)] - formula).norm() < 1e-15);
        let id = F::scalar_real(&[0.0, 1.0], &[1.0]).unwrap();
        for (z, w) in [(c(0.3, 1.0), c(-2.0, 0.5)), (c(1.0, -1.0), c(4.0, 2.0))] {
            assert!((kernel_value(&id, z, w).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn gram_examples() {
        let pts = [c(0.0, 1.0), c(0.0, 2.0)];
        let dirs = vec![CVec::from_element(1, c(1.0, 0.0)); 2];
        let g = gram_matrix(&minus_inv(), &pts, &dirs).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.25, 0.0)]);
        assert!(linalg::fro(&(&g.gram - expected)) < 1e-15);
        assert_eq!(g.inertia, Inertia::new(1, 1, 0));

        // Oracle: ζ² + ζz̄ + z̄² for V = z³, 2×2 eigenvalues from trace/det.
        let cube = F::scalar_real(&[0.0, 0.0, 0.0, 1.0], &[1.0]).unwrap();
        let g = gram_matrix(&cube, &pts, &dirs).unwrap();
        let mut oracle = CMat::zeros(2, 2);
        for j in 0..2 {
            for k in 0..2 {
                let (zb, w) = (pts[j].conj(), pts[k]);
                oracle[(j, k)] = w * w + w * zb + zb * zb;
            }
        }
        assert!(linalg::fro(&(&g.gram - &oracle)) < 1e-13);
        let tr = (oracle[(0, 0)] + oracle[(1, 1)]).re;
        let det = (oracle[(0, 0)] * oracle[(1, 1)] - oracle[(0, 1)] * oracle[(1, 0)]).re;
        assert!(det < 0.0 && tr.is_finite());
        assert_eq!(g.inertia, Inertia::new(1, 0, 1));

        let empty = gram_matrix(&cube, &[], &[]).unwrap();
        assert_eq!(empty.gram.nrows(), 0);
    }

    #[test]
    fn sampling_stream_is_nested() {
        let a = sample_points::<f64>(10, 7);
        let b = sample_points::<f64>(40, 7);
        assert_eq!(a[..], b[..10]);
        assert!(b.iter().all(|z| z.re.abs() <= 5.0 && z.im >= 0.1 && z.im <= 10.0));
    }

    #[test]
    fn kappa_examples() {
        let cfg = KernelConfig::default();
        let k = negative_squares(&minus_inv(), &cfg).unwrap();
        assert!(k.stabilized);
        assert_eq!(k.kappa, 0);
        let v = F::scalar_real(&[-1.0], &[0.0, 0.0, 1.0]).unwrap();
        let k = negative_squares(&v, &cfg).unwrap();
        assert!(k.stabilized);
        assert_eq!(k.kappa, 1);
    }

    #[test]
    fn example2_kappa_is_one() {
        let k = negative_squares(&F::example2(1.0, 0.0).unwrap(), &KernelConfig::default()).unwrap();
        assert!(k.stabilized, "{:?}", k.history);
        assert_eq!(k.kappa, 1);
    }

    #[test]
    fn rank_examples() {
        let cfg = KernelConfig::default();
        assert_eq!(kernel_rank(&minus_inv(), &cfg).unwrap().rank, 1);
        assert_eq!(kernel_rank(&F::scalar_real(&[-1.0], &[0.0, 0.0, 1.0]).unwrap(), &cfg).unwrap().rank, 2);
        let r = kernel_rank(&F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap(), &cfg).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn strictness_examples() {
        let cfg = KernelConfig::default();
        assert!(!strictness_default(&F::scalar_real(&[3.0], &[1.0]).unwrap(), &cfg).unwrap());
        assert!(strictness_default(&minus_inv(), &cfg).unwrap());
        let zero = F::scalar_real(&[0.0], &[1.0]).unwrap();
        let bd = F::BlockDiag(vec![minus_inv(), zero]);
        assert!(!strictness_default(&bd, &cfg).unwrap());
    }
}
