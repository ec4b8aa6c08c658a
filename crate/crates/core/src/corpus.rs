//! Seeded generator of test functions `V = V₀ · p p♯ / (q q♯)` with a
//! Herglotz sum `V₀(z) = Σ c_j / (t_j − z)`, `c_j > 0`, and known index
//! `κ = max(deg p, deg q)`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfun::{ComplexPolynomial, MatrixFunction, RationalFunction};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub count: usize,
    pub seed: u64,
    /// Indices cycle through `0..=max_kappa`.
    pub max_kappa: usize,
    pub min_poles: usize,
    pub max_poles: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { count: 20, seed: 0x4E4B, max_kappa: 2, min_poles: 1, max_poles: 4 }
    }
}

/// Construction record of one generated function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub kappa: usize,
    pub deg_p: usize,
    pub deg_q: usize,
    /// Poles `t_j` of the Herglotz sum.
    pub poles: Vec<f64>,
    /// Weights `c_j > 0`.
    pub weights: Vec<f64>,
    pub p_roots: Vec<[f64; 2]>,
    pub q_roots: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub config: CorpusConfig,
    pub entries: Vec<CorpusEntry>,
}

impl CorpusEntry {
    /// Assemble `V` from the recorded parameters.
    pub fn function<T: Real>(&self) -> Result<MatrixFunction<T>> {
        if self.poles.len() != self.weights.len() || self.poles.is_empty() {
            return Err(Error::Domain("a Herglotz sum needs matching poles and weights".into()));
        }
        let c = |x: f64, y: f64| Complex::new(lit::<T>(x), lit::<T>(y));
        let t: Vec<Complex<T>> = self.poles.iter().map(|&x| c(x, 0.0)).collect();
        let mut num0 = ComplexPolynomial::zero();
        for (j, &w) in self.weights.iter().enumerate() {
            let others: Vec<Complex<T>> = t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
            num0 = &num0 + &ComplexPolynomial::from_roots(&others).scale(c(-w, 0.0));
        }
        let sym = |roots: &[[f64; 2]]| {
            let all: Vec<Complex<T>> = roots.iter().flat_map(|&[x, y]| [c(x, y), c(x, -y)]).collect();
            ComplexPolynomial::from_roots(&all)
        };
        let num = &num0 * &sym(&self.p_roots);
        let den = &ComplexPolynomial::from_roots(&t) * &sym(&self.q_roots);
        let realify = |p: &ComplexPolynomial<T>| ComplexPolynomial::new(p.coeffs().iter().map(|z| Complex::new(z.re, T::zero())).collect());
        MatrixFunction::scalar(RationalFunction::new(realify(&num), realify(&den))?)
    }
}

fn separated(candidate: [f64; 2], taken: &[[f64; 2]], gap: f64) -> bool {
    taken.iter().all(|&[x, y]| ((x - candidate[0]).powi(2) + (y - candidate[1]).powi(2)).sqrt() >= gap)
}

fn draw_points(rng: &mut ChaCha8Rng, count: usize, im: (f64, f64), taken: &mut Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = (rng.random_range(-3.0..3.0) * 100.0_f64).round() / 100.0;
        let y = if im.0 == im.1 { im.0 } else { (rng.random_range(im.0..im.1) * 100.0_f64).round() / 100.0 };
        let cand = [x, y];
        if separated(cand, taken, 0.4) {
            taken.push(cand);
            out.push(cand);
        }
    }
    out
}

/// The hand-picked opening entries followed by seeded random ones.
pub fn generate(config: &CorpusConfig) -> Result<Manifest> {
    if config.max_kappa > 4 || config.max_poles > 10 || config.min_poles == 0 || config.min_poles > config.max_poles {
        return Err(Error::Domain("corpus supports κ ≤ 4 and 1 ≤ pole count ≤ 10".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut entries = Vec::with_capacity(config.count);
    let fixed = [
        (vec![-1.0, 0.5, 2.0], vec![1.0, 1.0, 1.0], vec![], vec![]),
        (vec![-1.5, 1.0, 2.5], vec![0.5, 1.0, 1.5], vec![[0.0, 0.0]], vec![[0.5, 1.5]]),
        (vec![-2.0, 1.5], vec![1.0, 2.0], vec![], vec![[0.0, 1.0], [1.0, 1.0]]),
    ];
    for (idx, (poles, weights, p_roots, q_roots)) in fixed.into_iter().enumerate() {
        if entries.len() == config.count || idx > config.max_kappa {
            break;
        }
        let kappa = p_roots.len().max(q_roots.len());
        entries.push(CorpusEntry {
            name: format!("v{:02}", entries.len()),
            kappa,
            deg_p: p_roots.len(),
            deg_q: q_roots.len(),
            poles,
            weights,
            p_roots,
            q_roots,
        });
    }
    while entries.len() < config.count {
        let kappa = entries.len() % (config.max_kappa + 1);
        let deg_p = rng.random_range(0..=kappa);
        let n_poles = rng.random_range(config.min_poles..=config.max_poles);
        let mut taken = Vec::new();
        let mut poles: Vec<f64> = draw_points(&mut rng, n_poles, (0.0, 0.0), &mut taken).iter().map(|p| p[0]).collect();
        poles.sort_by(f64::total_cmp);
        let weights = (0..n_poles).map(|_| (rng.random_range(0.5..2.0) * 100.0_f64).round() / 100.0).collect();
        let q_roots = draw_points(&mut rng, kappa, (0.5, 3.0), &mut taken);
        let p_roots = draw_points(&mut rng, deg_p, (0.5, 3.0), &mut taken);
        entries.push(CorpusEntry {
            name: format!("v{:02}", entries.len()),
            kappa,
            deg_p,
            deg_q: kappa,
            poles,
            weights,
            p_roots,
            q_roots,
        });
    }
    Ok(Manifest { format: 1, config: *config, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{negative_squares, KernelConfig};

    #[test]
    fn herglotz_sum_has_positive_imaginary_part() {
        let e = CorpusEntry {
            name: "h".into(),
            kappa: 0,
            deg_p: 0,
            deg_q: 0,
            poles: vec![-1.0, 0.5, 2.0],
            weights: vec![1.0, 2.0, 0.5],
            p_roots: vec![],
            q_roots: vec![],
        };
        let v = e.function::<f64>().unwrap();
        let z = Complex::new(0.3, 0.7);
        // Direct oracle: the defining sum.
        let direct: Complex<f64> = e.poles.iter().zip(&e.weights).map(|(&t, &c)| c / (t - z)).sum();
        assert!((v.eval(z).unwrap()[(0, 0)] - direct).norm() < 1e-14);
        assert!(direct.im > 0.0);
    }

    #[test]
    fn generation_is_deterministic_and_respects_the_config() {
        let cfg = CorpusConfig::default();
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap());
        assert_eq!(a.entries.len(), 20);
        for e in &a.entries {
            assert!(e.deg_p <= e.deg_q && e.kappa == e.deg_q && e.kappa <= 2);
            assert!(e.weights.iter().all(|&c| c > 0.0));
            for r in e.p_roots.iter().chain(&e.q_roots) {
                assert!(r[0].abs() <= 3.0 && (0.0..=3.0).contains(&r[1]));
            }
            let v = e.function::<f64>().unwrap();
            let f = v.as_scalar_rational().unwrap();
            assert!(f.is_strictly_proper() && f.is_real_symmetric());
            assert_eq!(f.den().degree(), e.poles.len() + 2 * e.deg_q);
        }
        assert!(generate(&CorpusConfig { max_kappa: 5, ..cfg }).is_err());
    }

    #[test]
    fn opening_entries_have_the_intended_index() {
        let m = generate(&CorpusConfig { count: 3, ..CorpusConfig::default() }).unwrap();
        for (e, want) in m.entries.iter().zip([0, 1, 2]) {
            let k = negative_squares(&e.function::<f64>().unwrap(), &KernelConfig::default()).unwrap();
            assert_eq!((e.kappa, k.kappa, k.stabilized), (want, want, true), "{}", e.name);
        }
    }
}
