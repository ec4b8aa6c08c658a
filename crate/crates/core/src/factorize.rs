//! Krein–Langer factorization `V = (p p♯)/(q q♯)·V₀` of scalar functions.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::classify::{self, ClassifyConfig, InfinityLabel};
use crate::error::{Error, Result};
use crate::kernel;
use crate::ratfun::{ComplexPolynomial, MatrixFunction, RationalFunction};
use crate::scalar::{cabs, lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Pole,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location<T: Real> {
    Finite(Complex<T>),
    Infinity,
}

/// Generalized pole or zero of nonpositive type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonposPoint<T: Real> {
    pub location: Location<T>,
    pub kind: PointKind,
    /// Contribution to `deg q` (poles) or `deg p` (zeros); at infinity the
    /// degree gap `|deg p − deg q|`.
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct Factorization<T: Real> {
    pub p: ComplexPolynomial<T>,
    pub q: ComplexPolynomial<T>,
    pub v0: MatrixFunction<T>,
    pub kappa: usize,
    pub points: Vec<NonposPoint<T>>,
    /// Negative-square counts after each greedy stripping step, starting
    /// with `V` itself.
    pub kappa_trace: Vec<usize>,
}

impl<T: Real> Factorization<T> {
    /// `(p p♯)/(q q♯)·V₀(z)`.
    pub fn reconstruct(&self, z: Complex<T>) -> Result<Complex<T>> {
        let pp = self.p.eval(z) * self.p.sharp().eval(z);
        let qq = self.q.eval(z) * self.q.sharp().eval(z);
        Ok(pp / qq * self.v0.eval(z)?[(0, 0)])
    }
}

fn scalar_rational<T: Real>(v: &MatrixFunction<T>) -> Result<&RationalFunction<T>> {
    if v.dim() != 1 {
        return Err(Error::Dimension("factorization is defined for scalar functions".into()));
    }
    v.as_scalar_rational()
        .ok_or_else(|| Error::Unsupported("factorization of finite points requires rational data".into()))
}

fn is_real_point<T: Real>(r: Complex<T>) -> bool {
    r.im.abs() <= lit::<T>(1e-6) * T::one().max(cabs(r))
}

/// Nonpositive-type multiplicity of a real pole of order `k` with leading
/// Laurent coefficient `c`.
fn real_pole_budget<T: Real>(k: usize, c: T) -> usize {
    if k.is_multiple_of(2) {
        k / 2
    } else if c < T::zero() {
        (k - 1) / 2
    } else {
        k.div_ceil(2)
    }
}

/// Same for a real zero of order `k`, `V ≈ c (z − t)^k`.
fn real_zero_budget<T: Real>(k: usize, c: T) -> usize {
    if k.is_multiple_of(2) {
        k / 2
    } else if c > T::zero() {
        (k - 1) / 2
    } else {
        k.div_ceil(2)
    }
}

/// Finite nonpositive-type points of a rational function from the sign
/// rules, without the κ oracle.
fn finite_points<T: Real>(f: &RationalFunction<T>) -> Result<Vec<NonposPoint<T>>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = Vec::new();
    let poles = f.den().root_clusters()?;
    let zeros = if f.is_zero() { Vec::new() } else { f.num().root_clusters()? };
    for (kind, roots) in [(PointKind::Pole, &poles), (PointKind::Zero, &zeros)] {
        for &(r, k) in roots {
            if is_real_point(r) {
                let t = Complex::new(r.re, T::zero());
                let c = match kind {
                    PointKind::Pole => {
                        let rest = f.den().div_rem(&ComplexPolynomial::from_roots(&vec![t; k]))?.0;
                        f.num().eval(t) / rest.eval(t)
                    }
                    PointKind::Zero => {
                        let taylor = f.num().taylor_at(t);
                        taylor.get(k).copied().unwrap_or(zero) / f.den().eval(t)
                    }
                };
                let j = match kind {
                    PointKind::Pole => real_pole_budget(k, c.re),
                    PointKind::Zero => real_zero_budget(k, c.re),
                };
                if j > 0 {
                    out.push(NonposPoint { location: Location::Finite(t), kind, multiplicity: j });
                }
            } else if r.im > T::zero() {
                out.push(NonposPoint { location: Location::Finite(r), kind, multiplicity: k });
            }
        }
    }
    Ok(out)
}

fn degrees<T: Real>(points: &[NonposPoint<T>]) -> (usize, usize) {
    points.iter().fold((0, 0), |(p, q), pt| match (pt.location, pt.kind) {
        (Location::Infinity, _) => (p, q),
        (_, PointKind::Zero) => (p + pt.multiplicity, q),
        (_, PointKind::Pole) => (p, q + pt.multiplicity),
    })
}

fn factor_roots<T: Real>(points: &[NonposPoint<T>], kind: PointKind) -> Vec<Complex<T>> {
    points
        .iter()
        .filter(|pt| pt.kind == kind)
        .flat_map(|pt| match pt.location {
            Location::Finite(r) => vec![r; pt.multiplicity],
            Location::Infinity => Vec::new(),
        })
        .collect()
}

fn mirrored<T: Real>(roots: &[Complex<T>]) -> Vec<Complex<T>> {
    roots.iter().flat_map(|&r| [r, r.conj()]).collect()
}

/// Remove matching roots from two multisets.
fn cancel<T: Real>(a: &mut Vec<Complex<T>>, b: &mut Vec<Complex<T>>) {
    let mut i = 0;
    while i < a.len() {
        let tol = lit::<T>(1e-6) * T::one().max(cabs(a[i]));
        if let Some(j) = b.iter().position(|&y| cabs(y - a[i]) <= tol) {
            b.swap_remove(j);
            a.swap_remove(i);
        } else {
            i += 1;
        }
    }
}

/// Drop imaginary rounding noise from a function whose exact form is real.
fn realify<T: Real>(p: ComplexPolynomial<T>) -> ComplexPolynomial<T> {
    let scale = p.norm();
    if p.coeffs().iter().all(|c| c.im.abs() <= lit::<T>(1e-9) * scale) {
        p.map(|c| Complex::new(c.re, T::zero()))
    } else {
        p
    }
}

/// `V · (q q♯)/(p p♯)` with the known cancellations done on roots.
fn strip<T: Real>(f: &RationalFunction<T>, p_roots: &[Complex<T>], q_roots: &[Complex<T>]) -> Result<RationalFunction<T>> {
    let mut num = if f.is_zero() { Vec::new() } else { f.num().roots()? };
    let mut den = f.den().roots()?;
    num.extend(mirrored(q_roots));
    den.extend(mirrored(p_roots));
    cancel(&mut num, &mut den);
    let lc = f.num().leading();
    let n = ComplexPolynomial::from_roots(&num).scale(lc);
    let d = ComplexPolynomial::from_roots(&den);
    let (n, d) = if f.num().is_real() && f.den().is_real() { (realify(n), realify(d)) } else { (n, d) };
    RationalFunction::new(n, d)
}

fn order_key<T: Real>(pt: &NonposPoint<T>) -> (u8, f64) {
    match pt.location {
        Location::Infinity => (0, 0.0),
        Location::Finite(r) if !is_real_point(r) => (1, to_f64(cabs(r))),
        Location::Finite(r) => (2, to_f64(cabs(r))),
    }
}

/// Generalized poles and zeros of nonpositive type, confirmed by greedy
/// stripping against the kernel estimate of κ.
pub fn nonpos_points<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<Vec<NonposPoint<T>>> {
    Ok(analyse(v, config)?.0)
}

fn analyse<T: Real>(
    v: &MatrixFunction<T>,
    config: &ClassifyConfig,
) -> Result<(Vec<NonposPoint<T>>, RationalFunction<T>, Vec<usize>)> {
    if !v.symmetry_check() {
        return Err(Error::Domain("factorization requires V(conj z) = V(z)*".into()));
    }
    let f = scalar_rational(v)?;
    let mut points = finite_points(f)?;
    points.sort_by(|a, b| order_key(a).partial_cmp(&order_key(b)).unwrap_or(std::cmp::Ordering::Equal));

    let kappa_of = |g: &RationalFunction<T>| -> Result<kernel::KappaEstimate> {
        kernel::negative_squares(&MatrixFunction::scalar(g.clone())?, &config.kernel)
    };
    let start = kappa_of(f)?;
    let mut trace = vec![start.kappa];
    let mut current = f.clone();
    for (i, pt) in points.iter().enumerate() {
        let one = std::slice::from_ref(pt);
        current = strip(&current, &factor_roots(one, PointKind::Zero), &factor_roots(one, PointKind::Pole))?;
        let k = kappa_of(&current)?;
        if k.kappa > *trace.last().unwrap_or(&usize::MAX) {
            log::warn!(
                "stripping candidate {i} ({:?}) raised the negative-square count {} -> {}",
                pt.location,
                trace.last().unwrap_or(&0),
                k.kappa
            );
        }
        trace.push(k.kappa);
    }
    let final_kappa = kappa_of(&current)?;
    if final_kappa.kappa != 0 || !final_kappa.stabilized {
        return Err(Error::Inconsistent(format!(
            "negative squares remain after stripping every candidate: trace {trace:?}, final history {:?}",
            final_kappa.history
        )));
    }
    let (dp, dq) = degrees(&points);
    let label = classify::infinity_type(v, config)?.label;
    let expected = match label {
        InfinityLabel::GenPoleNonpos => dp > dq,
        InfinityLabel::GenZeroNonpos => dp < dq,
        _ => dp == dq,
    };
    if !expected {
        return Err(Error::Inconsistent(format!(
            "infinity type {label:?} disagrees with deg p = {dp}, deg q = {dq}"
        )));
    }
    if dp != dq {
        points.insert(
            0,
            NonposPoint {
                location: Location::Infinity,
                kind: if dp > dq { PointKind::Pole } else { PointKind::Zero },
                multiplicity: dp.abs_diff(dq),
            },
        );
    }
    Ok((points, current, trace))
}

/// Factorize a symmetric scalar rational function.
pub fn factorize<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<Factorization<T>> {
    let (points, v0, kappa_trace) = analyse(v, config)?;
    let p = ComplexPolynomial::from_roots(&factor_roots(&points, PointKind::Zero));
    let q = ComplexPolynomial::from_roots(&factor_roots(&points, PointKind::Pole));
    let kappa = p.degree().max(q.degree());
    Ok(Factorization { p, q, v0: MatrixFunction::scalar(v0)?, kappa, points, kappa_trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T19Branch {
    /// `deg p > deg q`: generalized pole of nonpositive type at infinity.
    PoleAtInfinity,
    /// `deg p < deg q`: generalized zero of nonpositive type at infinity.
    ZeroAtInfinity,
    /// `deg p = deg q`: decided by `V₀ ∈ N(R)`.
    EqualDegrees,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T19Result {
    pub realizable: bool,
    pub branch: T19Branch,
    pub route: String,
}

/// Realizability through the factorization and the behaviour at infinity.
pub fn t19_check<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<T19Result> {
    if v.dim() != 1 {
        return Err(Error::Dimension("t19 check is defined for scalar functions".into()));
    }
    if !v.is_rational() {
        let label = classify::infinity_type(v, config)?.label;
        return match label {
            InfinityLabel::GenPoleNonpos => Ok(T19Result {
                realizable: false,
                branch: T19Branch::PoleAtInfinity,
                route: "infinity is a generalized pole of nonpositive type (deg p > deg q): V is not in N_κ(R)".into(),
            }),
            InfinityLabel::GenZeroNonpos => Ok(T19Result {
                realizable: true,
                branch: T19Branch::ZeroAtInfinity,
                route: "infinity is a generalized zero of nonpositive type (deg p < deg q): V is definitely in the class N_κ(R)".into(),
            }),
            _ => Err(Error::Unsupported(
                "equal-degree branch needs the factor V0, which requires rational data".into(),
            )),
        };
    }
    let fac = factorize(v, config)?;
    let (dp, dq) = (fac.p.degree(), fac.q.degree());
    if dp > dq {
        return Ok(T19Result {
            realizable: false,
            branch: T19Branch::PoleAtInfinity,
            route: format!("deg p = {dp} > deg q = {dq}: generalized pole of nonpositive type at infinity, V is not in N_κ(R)"),
        });
    }
    if dp < dq {
        return Ok(T19Result {
            realizable: true,
            branch: T19Branch::ZeroAtInfinity,
            route: format!("deg p = {dp} < deg q = {dq}: V is definitely in the class N_κ(R)"),
        });
    }
    let v0 = fac.v0.as_scalar_rational().expect("factor is scalar rational");
    let linear = v0.relative_degree().is_some_and(|k| k >= 1);
    let constant = v0.is_constant() || v0.is_zero();
    let decays = v0.is_strictly_proper();
    let realizable = !linear && !constant && decays;
    let why = if linear {
        "V0(iy)/y does not tend to 0 (linear term)".to_string()
    } else if constant {
        "V0 is constant (strictness fails)".to_string()
    } else if !decays {
        "y·V0(iy) is unbounded with V0(iy) not tending to 0, so V0 is not in N(R)".to_string()
    } else {
        "lim y·V0(iy) is finite, so E_inf = E and V0 is in N¹(R); V inherits the subclass N¹".to_string()
    };
    Ok(T19Result {
        realizable,
        branch: T19Branch::EqualDegrees,
        route: format!("deg p = deg q = {dp}: {why}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = MatrixFunction<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cfg() -> ClassifyConfig {
        ClassifyConfig::default()
    }

    fn finite(pt: &NonposPoint<f64>) -> Option<Complex<f64>> {
        match pt.location {
            Location::Finite(r) => Some(r),
            Location::Infinity => None,
        }
    }

    #[test]
    fn points_of_inverse() {
        let pts = nonpos_points(&F::scalar_real(&[1.0], &[0.0, 1.0]).unwrap(), &cfg()).unwrap();
        let fin: Vec<_> = pts.iter().filter(|p| finite(p).is_some()).collect();
        assert_eq!(fin.len(), 1);
        assert_eq!((fin[0].kind, fin[0].multiplicity), (PointKind::Pole, 1));
        assert!(finite(fin[0]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn points_of_minus_inverse_square() {
        let pts = nonpos_points(&F::scalar_real(&[-1.0], &[0.0, 0.0, 1.0]).unwrap(), &cfg()).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].location, pts[0].kind), (Location::Infinity, PointKind::Zero));
        assert_eq!((pts[1].kind, pts[1].multiplicity), (PointKind::Pole, 1));
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(&F::scalar_real(&[1.0], &[0.0, 1.0]).unwrap(), &cfg()).unwrap();
        assert_eq!(f.p, ComplexPolynomial::one());
        assert!((&f.q - &ComplexPolynomial::identity()).norm() < 1e-12);
        let v0 = f.v0.as_scalar_rational().unwrap();
        assert!((v0.eval(c(0.3, 0.7)).unwrap() - c(0.3, 0.7)).norm() < 1e-12);

        let f = factorize(&F::scalar_real(&[-1.0], &[0.0, 0.0, 1.0]).unwrap(), &cfg()).unwrap();
        assert_eq!(f.kappa, 1);
        assert!((f.v0.eval(c(1.0, 1.0)).unwrap()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-12);

        let v = F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap();
        let f = factorize(&v, &cfg()).unwrap();
        assert!((&f.p - &ComplexPolynomial::identity()).norm() < 1e-12);
        assert!((&f.q - &ComplexPolynomial::new(vec![c(0.0, -1.0), c(1.0, 0.0)])).norm() < 1e-10);
        let z = c(0.4, 1.7);
        assert!((f.v0.eval(z).unwrap()[(0, 0)] + c(1.0, 0.0) / z).norm() < 1e-10);
        assert!((f.reconstruct(z).unwrap() - v.eval(z).unwrap()[(0, 0)]).norm() < 1e-12);
        assert_eq!(f.kappa, 1);
    }

    #[test]
    fn t19_examples() {
        let r = t19_check(&F::scalar_real(&[1.0], &[0.0, 1.0]).unwrap(), &cfg()).unwrap();
        assert!(r.realizable);
        assert_eq!(r.branch, T19Branch::ZeroAtInfinity);
        let r = t19_check(&F::scalar_real(&[0.0, 0.0, 0.0, 1.0], &[1.0]).unwrap(), &cfg()).unwrap();
        assert!(!r.realizable);
        assert_eq!(r.branch, T19Branch::PoleAtInfinity);
        let r = t19_check(&F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap(), &cfg()).unwrap();
        assert!(r.realizable);
        assert_eq!(r.branch, T19Branch::EqualDegrees);
        let r = t19_check(&F::example2(1.0, 0.0).unwrap(), &cfg()).unwrap();
        assert!(r.realizable);
    }

    #[test]
    fn factor_is_idempotent() {
        let v = F::scalar_real(&[0.0, -1.0], &[1.0, 0.0, 1.0]).unwrap();
        let f = factorize(&v, &cfg()).unwrap();
        let g = factorize(&f.v0, &cfg()).unwrap();
        assert_eq!((g.p.degree(), g.q.degree()), (0, 0));
    }

    #[test]
    fn budget_rules() {
        assert_eq!(real_pole_budget(1, -1.0), 0);
        assert_eq!(real_pole_budget(1, 1.0), 1);
        assert_eq!(real_pole_budget(2, -1.0), 1);
        assert_eq!(real_pole_budget(3, -1.0), 1);
        assert_eq!(real_pole_budget(3, 1.0), 2);
        assert_eq!(real_zero_budget(1, 1.0), 0);
        assert_eq!(real_zero_budget(1, -1.0), 1);
        assert_eq!(real_zero_budget(2, 5.0), 1);
    }

    #[test]
    fn third_order_poles_agree_with_kernel() {
        // Oracle: kernel negative squares of ±1/z³ directly.
        for sign in [1.0, -1.0] {
            let v = F::scalar_real(&[sign], &[0.0, 0.0, 0.0, 1.0]).unwrap();
            let f = factorize(&v, &cfg()).unwrap();
            let k = kernel::negative_squares(&v, &cfg().kernel).unwrap();
            assert!(k.stabilized);
            assert_eq!(f.kappa, k.kappa, "sign {sign}");
        }
    }
}
