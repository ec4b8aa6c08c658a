//! Realizability (growth, strictness and decay conditions) and the
//! `N⁰ / N¹ / N⁰¹` subclass of a generalized Nevanlinna function.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, KappaEstimate, KernelConfig};
use crate::linalg::{self, CMat, CVec};
use crate::ratfun::MatrixFunction;
use crate::scalar::{cabs, lit, to_c64, to_f64, Real};

/// Behaviour of a scalar function at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfinityLabel {
    /// `lim V(z)/z ∈ [−∞, 0)`.
    GenPoleNonpos,
    /// `lim z V(z) ∈ [0, ∞)`.
    GenZeroNonpos,
    Neither,
    /// Growth faster than linear that is not a nonpositive-type pole.
    ImproperGrowth,
}

/// Limit value on the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedComplex {
    Finite([f64; 2]),
    PlusInfinity,
    MinusInfinity,
    /// Diverges along a non-real direction.
    ComplexInfinity,
    Indeterminate,
}

impl ExtendedComplex {
    fn finite(z: Complex<f64>) -> Self {
        Self::Finite([z.re, z.im])
    }

    /// Infinity in the direction of `w`.
    fn towards(w: Complex<f64>) -> Self {
        let scale = w.norm();
        if w.im.abs() <= 1e-6 * scale {
            if w.re > 0.0 {
                Self::PlusInfinity
            } else {
                Self::MinusInfinity
            }
        } else {
            Self::ComplexInfinity
        }
    }

    /// Membership in `[−∞, 0)`.
    pub fn in_negative_closed_ray(&self) -> bool {
        match *self {
            Self::MinusInfinity => true,
            Self::Finite([re, im]) => re < 0.0 && im.abs() <= 1e-6 * re.abs().max(1.0),
            _ => false,
        }
    }

    /// Membership in `[0, ∞)`.
    pub fn in_nonnegative_ray(&self) -> bool {
        match *self {
            Self::Finite([re, im]) => re >= -1e-12 && im.abs() <= 1e-6 * re.abs().max(1.0),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfinityType {
    pub label: InfinityLabel,
    pub limit_v_over_z: ExtendedComplex,
    pub limit_zv: ExtendedComplex,
}

impl InfinityType {
    fn from_limits(v_over_z: ExtendedComplex, zv: ExtendedComplex, superlinear: bool) -> Result<Self> {
        let label = if v_over_z.in_negative_closed_ray() {
            InfinityLabel::GenPoleNonpos
        } else if zv.in_nonnegative_ray() {
            InfinityLabel::GenZeroNonpos
        } else if matches!(v_over_z, ExtendedComplex::Indeterminate) || matches!(zv, ExtendedComplex::Indeterminate) {
            return Err(Error::Inconclusive("limit at infinity did not stabilize along iy".into()));
        } else if superlinear {
            InfinityLabel::ImproperGrowth
        } else {
            InfinityLabel::Neither
        };
        Ok(Self { label, limit_v_over_z: v_over_z, limit_zv: zv })
    }
}

/// Settings for the numeric limits along `z = iy` and the kernel estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub kernel: KernelConfig,
    /// Bound on `|y·(Im V(iy)f, f)|` for membership in 𝓑.
    pub bound: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub samples_per_decade: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { kernel: KernelConfig::default(), bound: 1e3, y_min: 10.0, y_max: 1e6, samples_per_decade: 8 }
    }
}

impl ClassifyConfig {
    pub fn y_grid(&self) -> Vec<f64> {
        let decades = (self.y_max / self.y_min).log10();
        let n = (decades * self.samples_per_decade as f64).round() as usize;
        (0..=n)
            .map(|k| self.y_min * 10f64.powf(k as f64 / self.samples_per_decade as f64))
            .collect()
    }
}

/// Asymptotic behaviour of a sampled sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Trend {
    Converges(Complex<f64>),
    Decays,
    Diverges(Complex<f64>),
    Unsettled,
}

impl Trend {
    fn limit(self) -> ExtendedComplex {
        match self {
            Trend::Converges(v) => ExtendedComplex::finite(v),
            Trend::Decays => ExtendedComplex::finite(Complex::new(0.0, 0.0)),
            Trend::Diverges(dir) => ExtendedComplex::towards(dir),
            Trend::Unsettled => ExtendedComplex::Indeterminate,
        }
    }

    fn tends_to_zero(self) -> bool {
        match self {
            Trend::Decays => true,
            Trend::Converges(v) => v.norm() <= 1e-8,
            _ => false,
        }
    }
}

fn trend(ys: &[f64], vals: &[Complex<f64>], per_decade: usize) -> Trend {
    let n = vals.len();
    if n < 3 {
        return Trend::Unsettled;
    }
    let last = vals[n - 1];
    if last.norm() == 0.0 {
        return Trend::Converges(last);
    }
    let agree = |a: Complex<f64>, b: Complex<f64>| (a - b).norm() <= 1e-6 * a.norm().max(b.norm());
    if agree(vals[n - 1], vals[n - 2]) && agree(vals[n - 2], vals[n - 3]) {
        return Trend::Converges(last);
    }
    let back = per_decade.min(n - 1);
    let (y0, v0) = (ys[n - 1 - back], vals[n - 1 - back]);
    let slope = if v0.norm() > 0.0 {
        (last.norm() / v0.norm()).ln() / (ys[n - 1] / y0).ln()
    } else {
        f64::INFINITY
    };
    if slope <= -0.5 {
        Trend::Decays
    } else if slope > 0.5 || last.norm() > 1e6 * vals[0].norm() {
        Trend::Diverges(last)
    } else {
        Trend::Unsettled
    }
}

/// One row of the `z = iy` sweep for a single direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    /// `(V(iy)f, f)/y`.
    pub v_over_y: [f64; 2],
    /// `y·(Im V(iy)f, f)`.
    pub y_im: f64,
    /// `|V(iy)f|`.
    pub abs_vf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub y: f64,
    /// `None` where `iy` is a pole.
    pub samples: Option<Vec<DirectionSample>>,
}

/// Sweep `z = iy` over the configured grid for every standard basis direction.
pub fn scan<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Vec<ScanRow> {
    let d = v.dim();
    config
        .y_grid()
        .into_iter()
        .map(|y| {
            let samples = v.eval(Complex::new(T::zero(), lit(y))).ok().map(|m| {
                (0..d)
                    .map(|k| {
                        let q = to_c64(m[(k, k)]);
                        let col = m.column(k);
                        let abs = col.iter().fold(0.0, |acc, c| acc + to_c64(*c).norm_sqr()).sqrt();
                        // Im of the quadratic form is the form of Im V = (V − V*)/2i.
                        let im = to_f64((m[(k, k)] - m[(k, k)].conj()).im) / 2.0;
                        DirectionSample { v_over_y: [q.re / y, q.im / y], y_im: y * im, abs_vf: abs }
                    })
                    .collect()
            });
            ScanRow { y, samples }
        })
        .collect()
}

/// Type of the point at infinity of a scalar function.
pub fn infinity_type<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<InfinityType> {
    if v.dim() != 1 {
        return Err(Error::Dimension("infinity type is defined for scalar functions".into()));
    }
    if let Some(f) = v.as_scalar_rational() {
        let Some(k) = f.relative_degree() else {
            let zero = ExtendedComplex::finite(Complex::new(0.0, 0.0));
            return InfinityType::from_limits(zero, zero, false);
        };
        let c = to_c64(f.num().leading());
        let i = Complex::new(0.0, 1.0);
        let zero = ExtendedComplex::finite(Complex::new(0.0, 0.0));
        let (v_over_z, zv) = match k {
            k if k >= 2 => (ExtendedComplex::towards(c * i.powi(k as i32 - 1)), ExtendedComplex::towards(c * i.powi(k as i32 + 1))),
            1 => (ExtendedComplex::finite(c), ExtendedComplex::towards(c * i * i)),
            0 => (zero, ExtendedComplex::towards(c * i)),
            -1 => (zero, ExtendedComplex::finite(c)),
            _ => (zero, zero),
        };
        return InfinityType::from_limits(v_over_z, zv, k >= 2);
    }
    let ys = config.y_grid();
    let mut over = Vec::with_capacity(ys.len());
    let mut times = Vec::with_capacity(ys.len());
    let mut used = Vec::with_capacity(ys.len());
    for &y in &ys {
        let z = Complex::new(0.0, y);
        if let Ok(m) = v.eval(Complex::new(T::zero(), lit(y))) {
            let val = to_c64(m[(0, 0)]);
            over.push(val / z);
            times.push(val * z);
            used.push(y);
        }
    }
    let t_over = trend(&used, &over, config.samples_per_decade);
    let t_times = trend(&used, &times, config.samples_per_decade);
    let superlinear = matches!(t_over, Trend::Diverges(_));
    InfinityType::from_limits(t_over.limit(), t_times.limit(), superlinear)
}

/// Subclass label of a realizable function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subclass {
    N0,
    N1,
    N01,
    #[serde(rename = "not_applicable")]
    NotApplicable,
}

/// Evidence collected while deciding the conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Evidence {
    /// `exact` (Laurent data) or `numeric` (sweep along `iy`).
    pub method: String,
    pub laurent_c0: Option<Vec<Vec<[f64; 2]>>>,
    pub laurent_c1: Option<Vec<Vec<[f64; 2]>>>,
    pub polynomial_degree: Option<usize>,
    /// Per tracked direction, `y·(Im V(iy)f, f)` along the grid.
    pub im_traces: Vec<Vec<[f64; 2]>>,
    /// `‖V(iy)‖/y` along the grid.
    pub growth_trace: Vec<[f64; 2]>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub kappa: KappaEstimate,
    pub cond_growth: bool,
    pub cond_strict: bool,
    #[serde(rename = "B_basis")]
    pub b_basis: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "cond_decay_on_B")]
    pub cond_decay_on_b: bool,
    pub subclass: Subclass,
    pub realizable: bool,
    pub evidence: Evidence,
}

/// Result of the 𝓑 computation.
#[derive(Debug, Clone)]
pub struct SubspaceB<T: Real> {
    /// Orthonormal columns spanning 𝓑.
    pub basis: CMat<T>,
    /// Whether `V(iy)f → 0` for every `f ∈ 𝓑`.
    pub decays: bool,
    /// Whether `(V(iy)f, f)/y → 0` for every `f`.
    pub growth_ok: bool,
    pub evidence: Evidence,
}

fn matrix_to_pairs<T: Real>(m: &CMat<T>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| { let c = to_c64(m[(i, j)]); [c.re, c.im] }).collect())
        .collect()
}

/// Orthonormal basis of the null space of `m` (columns), threshold relative
/// to `scale`.
fn null_space<T: Real>(m: &CMat<T>, scale: T) -> CMat<T> {
    let d = m.ncols();
    if m.nrows() == 0 {
        return linalg::identity(d);
    }
    let gram = m.adjoint() * m;
    let (vals, vecs) = linalg::hermitian_eigen(&gram);
    let tol = lit::<T>(1e-20) * T::one().max(scale * scale);
    let cols: Vec<usize> = (0..d).filter(|&k| vals[k] <= tol).collect();
    let mut out = CMat::zeros(d, cols.len());
    for (dst, &k) in cols.iter().enumerate() {
        out.set_column(dst, &vecs.column(k));
    }
    out
}

fn subspace_b_exact<T: Real>(v: &MatrixFunction<T>) -> Result<SubspaceB<T>> {
    let d = v.dim();
    let l = v.laurent_at_infinity(3)?;
    let pdeg = l.polynomial_degree();
    // Along iy every polynomial coefficient contributes a term growing at
    // least like y; 𝓑 is the common kernel of those coefficients.
    let mut stacked = CMat::zeros(pdeg * d, d);
    for k in 0..pdeg {
        stacked.view_mut((k * d, 0), (d, d)).copy_from(&l.polynomial_part[k]);
    }
    let scale = l.polynomial_part.iter().chain(&l.tail).fold(T::one(), |acc, m| acc.max(linalg::fro(m)));
    let basis = null_space(&stacked, scale);
    let c0 = &l.tail[0];
    let decays = linalg::fro(&(c0 * &basis)) <= lit::<T>(1e-12) * scale;
    let evidence = Evidence {
        method: "exact".into(),
        laurent_c0: Some(matrix_to_pairs(c0)),
        laurent_c1: Some(matrix_to_pairs(&l.tail[1])),
        polynomial_degree: Some(pdeg),
        notes: vec![format!(
            "y·Im V(iy) → −C₁ on the kernel of the polynomial part; polynomial degree {pdeg}"
        )],
        ..Evidence::default()
    };
    Ok(SubspaceB { basis, decays, growth_ok: pdeg == 0, evidence })
}

fn subspace_b_numeric<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<SubspaceB<T>> {
    let d = v.dim();
    let ys = config.y_grid();
    let mut used = Vec::new();
    let mut values: Vec<CMat<T>> = Vec::new();
    for &y in &ys {
        match v.eval(Complex::new(T::zero(), lit(y))) {
            Ok(m) => {
                used.push(y);
                values.push(m);
            }
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if used.len() < 3 {
        return Err(Error::Inconclusive("too few regular points on the imaginary axis".into()));
    }
    // Track eigen-directions of M(y) = y·Im V(iy) by overlap with the
    // previous grid point.
    let mut tracked: Option<CMat<T>> = None;
    let mut traces: Vec<Vec<f64>> = vec![Vec::new(); d];
    let two_i = Complex::new(T::zero(), lit::<T>(2.0));
    for (m, &y) in values.iter().zip(&used) {
        let im = (m - m.adjoint()) / two_i * Complex::new(lit::<T>(y), T::zero());
        let (vals, vecs) = linalg::hermitian_eigen(&im);
        let order: Vec<usize> = match &tracked {
            None => (0..d).collect(),
            Some(prev) => {
                let mut taken = vec![false; d];
                (0..d)
                    .map(|i| {
                        let mut best = (0, -T::one());
                        for j in (0..d).filter(|&j| !taken[j]) {
                            let ov = (prev.column(i).adjoint() * vecs.column(j))[(0, 0)];
                            if cabs(ov) > best.1 {
                                best = (j, cabs(ov));
                            }
                        }
                        taken[best.0] = true;
                        best.0
                    })
                    .collect()
            }
        };
        let mut next = CMat::zeros(d, d);
        for (i, &j) in order.iter().enumerate() {
            next.set_column(i, &vecs.column(j));
            traces[i].push(to_f64(vals[j]));
        }
        tracked = Some(next);
    }
    let last = tracked.expect("at least one grid point");
    let per = config.samples_per_decade;
    let mut keep = Vec::new();
    for (i, tr) in traces.iter().enumerate() {
        let seq: Vec<Complex<f64>> = tr.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let bounded = tr.iter().all(|x| x.abs() < config.bound) || matches!(trend(&used, &seq, per), Trend::Converges(_));
        if bounded {
            keep.push(i);
        }
    }
    let mut basis = CMat::zeros(d, keep.len());
    for (dst, &i) in keep.iter().enumerate() {
        basis.set_column(dst, &last.column(i));
    }
    let mut decays = true;
    for k in 0..basis.ncols() {
        let f: CVec<T> = basis.column(k).into_owned();
        let seq: Vec<Complex<f64>> = values
            .iter()
            .map(|m| Complex::new(to_f64((m * &f).norm()), 0.0))
            .collect();
        decays &= trend(&used, &seq, per).tends_to_zero();
    }
    let growth: Vec<Complex<f64>> = values
        .iter()
        .zip(&used)
        .map(|(m, &y)| Complex::new(to_f64(linalg::fro(m)) / y, 0.0))
        .collect();
    let growth_ok = trend(&used, &growth, per).tends_to_zero();
    let evidence = Evidence {
        method: "numeric".into(),
        im_traces: traces
            .iter()
            .map(|tr| used.iter().zip(tr).map(|(&y, &t)| [y, t]).collect())
            .collect(),
        growth_trace: used.iter().zip(&growth).map(|(&y, g)| [y, g.re]).collect(),
        notes: vec![format!(
            "𝓑 membership: |y·(Im V(iy)f,f)| < {} on y ∈ [{}, {}] or a convergent trace",
            config.bound, config.y_min, config.y_max
        )],
        ..Evidence::default()
    };
    Ok(SubspaceB { basis, decays, growth_ok, evidence })
}

/// The subspace 𝓑 of directions along which `y·(Im V(iy)f, f)` stays bounded.
pub fn subspace_b<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<SubspaceB<T>> {
    if v.is_rational() {
        subspace_b_exact(v)
    } else {
        subspace_b_numeric(v, config)
    }
}

/// Evaluate every realizability condition and assign the subclass.
pub fn classify_full<T: Real>(v: &MatrixFunction<T>, config: &ClassifyConfig) -> Result<ClassificationReport> {
    if !v.symmetry_check() {
        return Err(Error::Domain("classification requires V(conj z) = V(z)*".into()));
    }
    let d = v.dim();
    let kappa = kernel::negative_squares(v, &config.kernel)?;
    let cond_strict = kernel::strictness_default(v, &config.kernel)?;
    let b = subspace_b(v, config)?;
    let cond_growth = b.growth_ok;
    let cond_decay_on_b = b.decays;
    let realizable = cond_growth && cond_strict && cond_decay_on_b && kappa.stabilized;
    let subclass = if !realizable {
        Subclass::NotApplicable
    } else if b.basis.ncols() == 0 {
        Subclass::N0
    } else if b.basis.ncols() == d {
        Subclass::N1
    } else {
        Subclass::N01
    };
    let b_basis = (0..b.basis.ncols())
        .map(|k| b.basis.column(k).iter().map(|c| { let c = to_c64(*c); [c.re, c.im] }).collect())
        .collect();
    let mut evidence = b.evidence;
    if !kappa.stabilized {
        evidence.notes.push("negative-square count did not stabilize".into());
    }
    Ok(ClassificationReport {
        kappa,
        cond_growth,
        cond_strict,
        b_basis,
        cond_decay_on_b,
        subclass,
        realizable,
        evidence,
    })
}
