//! Acceptance suite: one PASS/FAIL line per criterion, plus indented
//! diagnostic lines. Exits non-zero when any criterion fails.

use std::time::Instant;

use nkappa::classify::{classify_full, scan, ClassifyConfig, Subclass};
use nkappa::colligation::{example2_system, schur_resolvent, BlockMatrix, Colligation};
use nkappa::corpus::{generate, CorpusConfig};
use nkappa::factorize::{factorize, t19_check};
use nkappa::kernel::{kernel_value, negative_squares, sample_points, KernelConfig};
use nkappa::linalg::{self, CMat};
use nkappa::realize::{pf_realize, realize_rkps, roundtrip_verify, RealizeConfig};
use nkappa::{Complex64, MatrixFunction64, SignatureMetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rational(num: &[f64], den: &[f64]) -> MatrixFunction64 {
    MatrixFunction64::scalar_real(num, den).expect("valid rational function")
}

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self { pass, summary: summary.into(), details: Vec::new() }
    }

    fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let v = MatrixFunction64::example2(1.0, 0.0).unwrap();
    match classify_full(&v, &ClassifyConfig::default()) {
        Ok(r) => {
            let secs = start.elapsed().as_secs_f64();
            let pass = r.kappa.kappa == 1 && r.kappa.stabilized && r.subclass == Subclass::N1 && r.realizable && secs < 10.0;
            Outcome::new(
                pass,
                format!(
                    "example2(1,0): kappa={} stabilized={} subclass={:?} realizable={} in {secs:.2}s",
                    r.kappa.kappa, r.kappa.stabilized, r.subclass, r.realizable
                ),
            )
        }
        Err(e) => Outcome::new(false, format!("classification failed: {e}")),
    }
}

/// Root formula as printed, with the denominator `1 + 2γ²`.
fn printed_pole(gamma: f64, d: f64) -> Complex64 {
    let g2 = gamma * gamma;
    c(d * (1.0 + 2.0 * g2), 2.0 * g2 * (4.0 * g2 + 1.0 - d * d).sqrt()) / (1.0 + 2.0 * g2)
}

/// Root of `((1+2γ²)z − d)² = 4γ⁴(z² − 1)` in the upper half-plane.
fn quadratic_pole(gamma: f64, d: f64) -> Complex64 {
    let g2 = gamma * gamma;
    c(d * (1.0 + 2.0 * g2), 2.0 * g2 * (4.0 * g2 + 1.0 - d * d).sqrt()) / (1.0 + 4.0 * g2)
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (gamma, d) in [(1.0, 0.0), (1.0, 0.5), (2.0, 1.0)] {
        let v = MatrixFunction64::example2(gamma, d).unwrap();
        let poles = v.upper_poles().unwrap_or_default();
        let printed = printed_pole(gamma, d);
        let quad = quadratic_pole(gamma, d);
        let Some(&found) = poles.first() else {
            pass = false;
            lines.push(format!("(γ,d)=({gamma},{d}): no pole found in the upper half-plane"));
            continue;
        };
        let err_printed = (found - printed).norm() / printed.norm();
        let err_quad = (found - quad).norm() / quad.norm();
        pass &= poles.len() == 1 && err_printed <= 1e-6;
        lines.push(format!(
            "(γ,d)=({gamma},{d}): search {found:.9} ({} pole(s)); printed formula {printed:.9} rel.err {err_printed:.2e}; \
             quadratic root with denominator 1+4γ² {quad:.9} rel.err {err_quad:.2e}",
            poles.len()
        ));
    }
    let mut out = Outcome::new(pass, "pole of example2 against the printed closed form at three parameter pairs");
    out.details = lines;
    out
}

fn criterion_3() -> Outcome {
    let z = c(0.0, 2.0);
    let exact = MatrixFunction64::example2(1.0, 0.0).unwrap().eval(z).unwrap()[(0, 0)];
    let errs: Vec<f64> = [25, 50, 100, 200]
        .iter()
        .map(|&n| {
            let sys = example2_system(1.0, 0.0, n).unwrap();
            (sys.impedance(z).unwrap()[(0, 0)] - exact).norm()
        })
        .collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let pass = errs[3] <= 1e-8 && monotone;
    let shown: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
    let small: Vec<String> = [2, 4, 8, 12, 16, 20]
        .iter()
        .map(|&n| {
            let sys = example2_system(1.0, 0.0, n).unwrap();
            format!("{n}:{:.1e}", (sys.impedance(z).unwrap()[(0, 0)] - exact).norm())
        })
        .collect();
    Outcome::new(pass, format!("quadrature errors at 2i for 25/50/100/200 nodes: [{}]; monotone={monotone}", shown.join(", ")))
        .detail(format!("errors for small node counts: {}", small.join(" ")))
}

fn criterion_4() -> Outcome {
    let cfg = ClassifyConfig::default();
    let check = |v: &MatrixFunction64| -> (String, bool) {
        let report = match classify_full(v, &cfg) {
            Ok(r) => r,
            Err(e) => return (format!("classification failed: {e}"), false),
        };
        let rows = scan(v, &cfg);
        let at = |y: f64| rows.iter().find(|r| (r.y - y).abs() <= 1e-9 * y).and_then(|r| r.samples.clone());
        let growth = rows
            .iter()
            .filter(|r| r.y <= 1e4 * (1.0 + 1e-12))
            .filter_map(|r| r.samples.as_ref())
            .any(|s| s[0].y_im.abs() > 1e3);
        let last = rows.last().and_then(|r| r.samples.clone()).map(|s| s[0].v_over_y);
        let first = at(10.0).map(|s| s[0].v_over_y);
        let decays = match (first, last) {
            (Some(a), Some(b)) => b[0].hypot(b[1]) < 1e-5 && b[0].hypot(b[1]) < a[0].hypot(a[1]),
            _ => false,
        };
        let pass = report.kappa.kappa == 1 && report.kappa.stabilized && report.subclass == Subclass::N0 && growth && decays;
        let history: Vec<usize> = report.kappa.history.iter().map(|h| h.negative).collect();
        (
            format!(
                "kappa={} stabilized={} (negative counts {history:?}) subclass={:?}; |y·Im V(iy)|>1e3 by y=1e4: {growth}; (V(iy),f)/y→0: {decays}",
                report.kappa.kappa, report.kappa.stabilized, report.subclass
            ),
            pass,
        )
    };
    let (text, pass) = check(&MatrixFunction64::example1());
    let (neg_text, _) = check(&MatrixFunction64::Builtin(nkappa::Builtin::Example1 { negated: true }));
    Outcome::new(pass, format!("example1 as printed: {text}"))
        .detail(format!("example1 with the opposite overall sign: {neg_text}"))
}

fn random_colligation(rng: &mut ChaCha8Rng) -> Colligation<f64> {
    let n = rng.random_range(1..=8);
    let kappa = rng.random_range(0..=n.min(3));
    let m = rng.random_range(1..=n.min(3));
    let metric = SignatureMetric::standard(n - kappa, kappa);
    let mut rc = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let a = CMat::from_fn(n, n, |_, _| rc());
    let k = CMat::from_fn(n, m, |_, _| rc());
    let herm = linalg::hermitian_part(&a);
    let h_r = metric.matrix() * herm;
    let signs: Vec<i8> = (0..m).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    Colligation::from_real_part(metric, h_r, k, SignatureMetric::diagonal(&signs).unwrap()).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut valid = true;
    let mut skipped = 0;
    for _ in 0..20 {
        let col = random_colligation(&mut rng);
        valid &= col.validate(1e-10).passes;
        for _ in 0..20 {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let z = c(rng.random_range(-3.0..3.0), sign * rng.random_range(0.1..3.0));
            match col.cayley(z) {
                Ok((res, scale)) => worst = worst.max(res / scale),
                Err(_) => skipped += 1,
            }
        }
    }
    let pass = valid && worst <= 1e-10 && skipped == 0;
    Outcome::new(pass, format!("20 colligations x 20 points: max residual/scale {worst:.2e}, all valid={valid}, unevaluable points {skipped}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=40);
        let n0 = rng.random_range(1..n);
        let p = n - n0;
        let mut rc = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let full = CMat::from_fn(n, n, |_, _| rc());
        let t = BlockMatrix::new(
            full.view((0, 0), (n0, n0)).into_owned(),
            full.view((n0, 0), (p, n0)).into_owned(),
            full.view((0, n0), (n0, p)).into_owned(),
            full.view((n0, n0), (p, p)).into_owned(),
        )
        .unwrap();
        let z = rc() * 2.0;
        let direct = linalg::inverse(&(&full - linalg::identity::<f64>(n) * z), 1e-14);
        match (schur_resolvent(&t, z), direct) {
            (Ok(r), Some(d)) => worst = worst.max(linalg::rel_diff(&r.assemble(), &d)),
            _ => failures += 1,
        }
    }
    Outcome::new(worst <= 1e-10 && failures == 0, format!("50 systems up to n=40: max relative difference {worst:.2e}, failures {failures}"))
}

fn held_out_points() -> Vec<Complex64> {
    sample_points(50, 0x0BAD_5EED)
}

fn criterion_7_8_9() -> (Outcome, Outcome, Outcome) {
    let manifest = generate(&CorpusConfig::default()).unwrap();
    let points = held_out_points();
    let kcfg = KernelConfig::default();
    let ccfg = ClassifyConfig::default();
    let (mut pass7, mut pass8, mut pass9) = (true, true, true);
    let (mut d7, mut d8, mut d9) = (Vec::new(), Vec::new(), Vec::new());
    let (mut max_rt, mut max_pf, mut max_rec, mut max_ker): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for e in &manifest.entries {
        let v = e.function::<f64>().unwrap();
        let kappa = negative_squares(&v, &kcfg).unwrap();
        // Round trip.
        match realize_rkps(&v, &RealizeConfig::default()) {
            Ok(col) => {
                let rep = roundtrip_verify(&v, &col, &points, 1e-6);
                max_rt = max_rt.max(rep.max_impedance_error);
                let pf_err = pf_realize(&v).map(|pf| {
                    points
                        .iter()
                        .map(|&z| {
                            let a = col.impedance_v(z).unwrap()[(0, 0)];
                            let b = pf.impedance_v(z).unwrap()[(0, 0)];
                            (a - b).norm() / b.norm()
                        })
                        .fold(0.0, f64::max)
                });
                let pf_err = pf_err.unwrap_or(f64::INFINITY);
                max_pf = max_pf.max(pf_err);
                let ok = rep.passes && col.metric().kappa() == kappa.kappa && kappa.stabilized && pf_err <= 1e-7;
                if !ok {
                    pass7 = false;
                    d7.push(format!("{}: {rep:?}, pf difference {pf_err:.2e}", e.name));
                }
                // Kernel identity on a 6 x 6 grid.
                let grid = &points[..6];
                let mut worst: f64 = 0.0;
                for &zeta in grid {
                    for &z in grid {
                        let lhs = col.gamma(zeta).unwrap().adjoint() * col.metric().matrix() * col.gamma(z).unwrap();
                        let rhs = kernel_value(&v, zeta, z).unwrap();
                        worst = worst.max(linalg::fro(&(&lhs - &rhs)) / linalg::fro(&rhs).max(1.0));
                    }
                }
                max_ker = max_ker.max(worst);
                if worst > 1e-8 {
                    pass9 = false;
                    d9.push(format!("{}: kernel identity residual {worst:.2e}", e.name));
                }
            }
            Err(err) => {
                pass7 = false;
                pass9 = false;
                d7.push(format!("{}: realization failed: {err}", e.name));
            }
        }
        // Factorization.
        match factorize(&v, &ccfg) {
            Ok(f) => {
                let rec = points
                    .iter()
                    .map(|&z| {
                        let a = v.eval(z).unwrap()[(0, 0)];
                        (f.reconstruct(z).unwrap() - a).norm() / a.norm()
                    })
                    .fold(0.0, f64::max);
                max_rec = max_rec.max(rec);
                let k0 = negative_squares(&f.v0, &kcfg).unwrap();
                let degs = f.p.degree().max(f.q.degree());
                let t19 = t19_check(&v, &ccfg).map(|r| r.realizable);
                let cls = classify_full(&v, &ccfg).map(|r| r.realizable);
                let ok = rec <= 1e-8 && k0.kappa == 0 && k0.stabilized && degs == kappa.kappa && matches!((&t19, &cls), (Ok(a), Ok(b)) if a == b);
                if !ok {
                    pass8 = false;
                    d8.push(format!(
                        "{}: reconstruction {rec:.2e}, kappa(V0)={}, max degree {degs} vs kappa {}, t19 {t19:?} vs classify {cls:?}",
                        e.name, k0.kappa, kappa.kappa
                    ));
                }
            }
            Err(err) => {
                pass8 = false;
                d8.push(format!("{}: factorization failed: {err}", e.name));
            }
        }
    }
    for (name, v, want) in [
        ("1/z", rational(&[1.0], &[0.0, 1.0]), true),
        ("z^3", rational(&[0.0, 0.0, 0.0, 1.0], &[1.0]), false),
        ("-z/(z^2+1)", rational(&[0.0, -1.0], &[1.0, 0.0, 1.0]), true),
    ] {
        let t19 = t19_check(&v, &ccfg).map(|r| r.realizable);
        let cls = classify_full(&v, &ccfg).map(|r| r.realizable);
        let ok = matches!(&t19, Ok(a) if *a == want) && matches!(&cls, Ok(b) if *b == want);
        if !ok {
            pass8 = false;
        }
        d8.push(format!("hand case {name}: t19 {t19:?}, classify {cls:?}, expected {want}"));
    }
    let mut o7 = Outcome::new(
        pass7,
        format!("20-function corpus: max impedance error {max_rt:.2e}, max rkps/pf difference {max_pf:.2e}, metric kappa = kernel kappa"),
    );
    o7.details = d7;
    let mut o8 = Outcome::new(pass8, format!("corpus factorization: max reconstruction error {max_rec:.2e}; t19 agrees with classify"));
    o8.details = d8;
    let mut o9 = Outcome::new(pass9, format!("kernel identity on 6x6 grids: max residual {max_ker:.2e}"));
    o9.details = d9;
    (o7, o8, o9)
}

fn criterion_10() -> Outcome {
    let cfg = ClassifyConfig::default();
    let z = rational(&[0.0, 1.0], &[1.0]);
    let constant = rational(&[3.0], &[1.0]);
    let cube = rational(&[0.0, 0.0, 0.0, 1.0], &[1.0]);
    let rz = classify_full(&z, &cfg);
    let rc = classify_full(&constant, &cfg);
    let r3 = classify_full(&cube, &cfg);
    let t3 = t19_check(&cube, &cfg);
    let z_ok = matches!(&rz, Ok(r) if !r.cond_growth && !r.realizable);
    let c_ok = matches!(&rc, Ok(r) if !r.cond_strict && !r.realizable);
    let cube_ok = matches!(&r3, Ok(r) if !r.realizable) && matches!(&t3, Ok(r) if !r.realizable);
    Outcome::new(
        z_ok && c_ok && cube_ok,
        format!("V=z rejected by growth: {z_ok}; V=3 rejected by strictness: {c_ok}; z^3 rejected by classify and t19: {cube_ok}"),
    )
}

fn main() {
    let started = Instant::now();
    let (o7, o8, o9) = criterion_7_8_9();
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        o7,
        o8,
        o9,
        criterion_10(),
    ];
    let mut failed = 0;
    for (i, o) in outcomes.iter().enumerate() {
        println!("criterion {:>2}: {}  {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("               {d}");
        }
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", outcomes.len() - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
