//! Thin helpers over `nalgebra` for dense complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{cabs, lit, real, Real};

pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

pub fn scalar_matrix<T: Real>(value: Complex<T>) -> CMat<T> {
    CMat::from_element(1, 1, value)
}

pub fn from_real_diagonal<T: Real>(values: &[T]) -> CMat<T> {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = real(*v);
    }
    m
}

/// Frobenius norm.
pub fn fro<T: Real>(m: &CMat<T>) -> T {
    let mut acc = T::zero();
    for z in m.iter() {
        acc += z.norm_sqr();
    }
    acc.sqrt()
}

/// Largest modulus of an entry.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// `‖a − b‖_F / max(1, ‖b‖_F)`.
pub fn rel_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    fro(&(a - b)) / T::one().max(fro(b))
}

pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * real(lit::<T>(0.5))
}

/// `‖H − H*‖_F / max(tiny, ‖H‖_F)`.
pub fn hermitian_defect<T: Real>(h: &CMat<T>) -> T {
    let scale = fro(h);
    if scale == T::zero() {
        return T::zero();
    }
    fro(&(h - h.adjoint())) / scale
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// The Hermitian part of `h` is used.
pub fn hermitian_eigen<T: Real>(h: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues<T: Real>(h: &CMat<T>) -> Vec<T> {
    hermitian_eigen(h).0
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues<T: Real>(m: &CMat<T>) -> Option<Vec<Complex<T>>> {
    if m.nrows() == 0 {
        return Some(Vec::new());
    }
    if m.nrows() == 1 {
        return Some(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), T::default_epsilon(), 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Solve `a x = b` by partial-pivot LU. Returns `None` when a pivot is
/// exactly zero or the pivot ratio falls below `rcond_min`.
pub fn solve<T: Real>(a: &CMat<T>, b: &CMat<T>, rcond_min: T) -> Option<CMat<T>> {
    if a.nrows() == 0 {
        return Some(CMat::zeros(0, b.ncols()));
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let mut pmax = T::zero();
    let mut pmin = T::max_value().unwrap_or(lit(f64::MAX));
    for i in 0..u.nrows() {
        let p = cabs(u[(i, i)]);
        pmax = pmax.max(p);
        pmin = pmin.min(p);
    }
    if pmax == T::zero() || pmin <= rcond_min * pmax {
        return None;
    }
    let x = lu.solve(b)?;
    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Default pivot-ratio threshold for resolvent solves.
pub fn default_rcond<T: Real>() -> T {
    lit(1e-14)
}

pub fn inverse<T: Real>(a: &CMat<T>, rcond_min: T) -> Option<CMat<T>> {
    solve(a, &identity(a.nrows()), rcond_min)
}

/// Block-diagonal assembly of square blocks.
pub fn block_diag<T: Real>(blocks: &[CMat<T>]) -> CMat<T> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(n, m);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Numerical rank with threshold `rel_tol · σ_max`.
pub fn rank<T: Real>(m: &CMat<T>, rel_tol: T) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > T::zero() => s.iter().filter(|&&x| x > rel_tol * smax).count(),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn hermitian_eigen_sorted_and_reconstructs() {
        let h: CMat<f64> = CMat::from_row_slice(
            2,
            2,
            &[cplx(2.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(-1.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals[0] < vals[1]);
        let d = from_real_diagonal(&vals);
        let rec = &vecs * d * vecs.adjoint();
        assert!(rel_diff(&rec, &h) < 1e-14);
    }

    #[test]
    fn solve_detects_singular() {
        let a: CMat<f64> = CMat::from_element(2, 2, cplx(1.0, 0.0));
        assert!(solve(&a, &identity(2), default_rcond()).is_none());
    }

    #[test]
    fn block_diag_places_blocks() {
        let a: CMat<f64> = scalar_matrix(cplx(1.0, 0.0));
        let b: CMat<f64> = identity(2) * cplx(2.0, 0.0);
        let m = block_diag(&[a, b]);
        assert_eq!(m.nrows(), 3);
        assert_eq!(m[(2, 2)], cplx(2.0, 0.0));
        assert_eq!(m[(0, 1)], cplx(0.0, 0.0));
    }
}
