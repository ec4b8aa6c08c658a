use std::fs;
use std::io::Write;
use std::path::Path;

use log::info;
use nkappa::classify::{self, ClassifyConfig, ScanRow};
use nkappa::colligation::{example2_system, Colligation};
use nkappa::corpus::{self, CorpusConfig};
use nkappa::indefinite;
use nkappa::io::{self as nio, JsonMatrix};
use nkappa::kernel::{self, KernelConfig};
use nkappa::realize::{self, RealizeConfig};
use nkappa::{factorize, Complex64, MatrixFunction64, RationalFunction};
use serde::Serialize;

use crate::failure::{Failure, Outcome};
use crate::{AxisArgs, Command, KernelArgs, Method, PointArgs};

const DEFAULT_SEED: u64 = 0x4E4B;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Kappa { file, kernel, out } => kappa(&file, &kernel, out.as_deref()),
        Command::Classify { file, kernel, axis, out, csv } => {
            classify(&file, &kernel, &axis, out.as_deref(), csv.as_deref())
        }
        Command::Factor { file, kernel, out } => factor(&file, &kernel, out.as_deref()),
        Command::Realize { file, out, method, cond_max, retries } => {
            realize(&file, &out, method, RealizeConfig { cond_max, retries, ..RealizeConfig::default() })
        }
        Command::Transfer { model, points, out } => evaluate(&model, &points, out.as_deref(), "W"),
        Command::Impedance { model, points, out } => evaluate(&model, &points, out.as_deref(), "V"),
        Command::Verify { file, model, points, tol, seed, out } => {
            verify(&file, &model, points, tol, resolve_seed(seed)?, out.as_deref())
        }
        Command::Schur { gamma, d, nodes, out, z } => schur(gamma, d, nodes, out.as_deref(), &z),
        Command::Scan { file, axis, out } => scan(&file, &axis, out.as_deref()),
        Command::Corpus { out_dir, count, seed, max_kappa, min_poles, max_poles } => {
            let config = CorpusConfig { count, seed: resolve_seed(seed)?, max_kappa, min_poles, max_poles };
            corpus(&out_dir, &config)
        }
    }
}

/// `NKAPPA_SEED` wins over `--seed`, which wins over the built-in default.
fn resolve_seed(flag: Option<u64>) -> Outcome<u64> {
    match std::env::var("NKAPPA_SEED") {
        Ok(s) => parse_seed(&s).ok_or_else(|| Failure::Usage(format!("NKAPPA_SEED: invalid seed {s:?}"))),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

fn parse_seed(s: &str) -> Option<u64> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

fn kernel_config(args: &KernelArgs) -> Outcome<KernelConfig> {
    if args.kernel_grid_start == 0 || args.kernel_grid_max < args.kernel_grid_start {
        return Err(Failure::Usage("need 0 < --kernel-grid-start <= --kernel-grid-max".into()));
    }
    Ok(KernelConfig {
        grid_start: args.kernel_grid_start,
        grid_max: args.kernel_grid_max,
        seed: resolve_seed(args.seed)?,
        tol: args.tol,
    })
}

fn classify_config(kernel: &KernelArgs, axis: &AxisArgs) -> Outcome<ClassifyConfig> {
    if !(axis.y_min > 0.0 && axis.y_max > axis.y_min) || axis.per_decade == 0 {
        return Err(Failure::Usage("need 0 < --y-min < --y-max and --per-decade > 0".into()));
    }
    Ok(ClassifyConfig {
        kernel: kernel_config(kernel)?,
        y_min: axis.y_min,
        y_max: axis.y_max,
        samples_per_decade: axis.per_decade,
        ..ClassifyConfig::default()
    })
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Failure::io(path, e))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Outcome {
    write(path, &nio::to_json(value)?)
}

fn load_function(path: &Path) -> Outcome<MatrixFunction64> {
    MatrixFunction64::from_json(&read(path)?).map_err(|e| Failure::in_file(path, e))
}

fn load_model(path: &Path) -> Outcome<Colligation<f64>> {
    nio::colligation_from_json(&read(path)?).map_err(|e| Failure::in_file(path, e))
}

/// Parse `a+bi`, `bi`, `a` or `-i`; whitespace anywhere is ignored.
pub fn parse_complex(text: &str) -> Outcome<Complex64> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    compact.parse::<Complex64>().map_err(|_| Failure::Usage(format!("cannot parse complex number {text:?}")))
}

fn load_points(args: &PointArgs) -> Outcome<Vec<Complex64>> {
    match &args.points {
        Some(path) => nio::points_from_json(&read(path)?).map_err(|e| Failure::in_file(path, e)),
        None => args.z.iter().map(|s| parse_complex(s)).collect(),
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.10e}{:+.10e}i", z.re, z.im)
}

fn kappa(file: &Path, args: &KernelArgs, out: Option<&Path>) -> Outcome {
    let v = load_function(file)?;
    let est = kernel::negative_squares(&v, &kernel_config(args)?)?;
    let counts: Vec<String> = est.history.iter().map(|r| r.negative.to_string()).collect();
    let sizes: Vec<String> = est.history.iter().map(|r| r.points.to_string()).collect();
    println!(
        "κ={} ({}; negative counts {} on {} points)",
        est.kappa,
        if est.stabilized { "stabilized" } else { "not stabilized" },
        counts.join(","),
        sizes.join("/")
    );
    if let Some(path) = out {
        write_json(path, &est)?;
    }
    if est.stabilized {
        Ok(())
    } else {
        Err(Failure::Unstable(format!("negative-square count did not stabilize by grid {}", args.kernel_grid_max)))
    }
}

fn classify(file: &Path, kernel: &KernelArgs, axis: &AxisArgs, out: Option<&Path>, csv: Option<&Path>) -> Outcome {
    let v = load_function(file)?;
    let config = classify_config(kernel, axis)?;
    let report = classify::classify_full(&v, &config)?;
    println!(
        "κ={} subclass={:?} realizable={} growth={} strict={} decay_on_B={} dim_B={}",
        report.kappa.kappa,
        report.subclass,
        report.realizable,
        report.cond_growth,
        report.cond_strict,
        report.cond_decay_on_b,
        report.b_basis.len()
    );
    for note in &report.evidence.notes {
        println!("  note: {note}");
    }
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    if let Some(path) = csv {
        write(path, &scan_csv(&classify::scan(&v, &config), v.dim())?)?;
    }
    if report.kappa.stabilized {
        Ok(())
    } else {
        Err(Failure::Unstable("negative-square count did not stabilize".into()))
    }
}

#[derive(Serialize)]
struct FactorFile {
    format: u32,
    kappa: usize,
    p: nkappa::ratfun::FunctionSpec,
    q: nkappa::ratfun::FunctionSpec,
    #[serde(rename = "V0")]
    v0: nkappa::ratfun::FunctionSpec,
    points: Vec<FactorPoint>,
    kappa_trace: Vec<usize>,
}

#[derive(Serialize)]
struct FactorPoint {
    kind: factorize::PointKind,
    /// `[re, im]`, or `null` at infinity.
    location: Option<[f64; 2]>,
    multiplicity: usize,
}

fn polynomial_spec(p: &nkappa::ComplexPolynomial64) -> Outcome<nkappa::ratfun::FunctionSpec> {
    Ok(MatrixFunction64::scalar(RationalFunction::polynomial(p.clone()))?.to_spec())
}

fn factor(file: &Path, args: &KernelArgs, out: Option<&Path>) -> Outcome {
    let v = load_function(file)?;
    let config = ClassifyConfig { kernel: kernel_config(args)?, ..ClassifyConfig::default() };
    if v.dim() != 1 {
        return Err(Failure::Inconsistent("factorization is defined for scalar functions only".into()));
    }
    if !kernel::strictness_default(&v, &config.kernel)? {
        return Err(Failure::Inconsistent(
            "strictness violation: the kernel vanishes, so V is a real constant and has no factorization".into(),
        ));
    }
    let f = factorize::factorize(&v, &config)?;
    println!("κ={} deg p={} deg q={}", f.kappa, f.p.degree(), f.q.degree());
    let points: Vec<FactorPoint> = f
        .points
        .iter()
        .map(|pt| FactorPoint {
            kind: pt.kind,
            location: match pt.location {
                factorize::Location::Finite(z) => Some([z.re, z.im]),
                factorize::Location::Infinity => None,
            },
            multiplicity: pt.multiplicity,
        })
        .collect();
    for pt in &points {
        let at = pt.location.map_or("∞".to_string(), |[re, im]| fmt_c(Complex64::new(re, im)));
        println!("  {:?} at {at} (multiplicity {})", pt.kind, pt.multiplicity);
    }
    if let Some(path) = out {
        let file = FactorFile {
            format: 1,
            kappa: f.kappa,
            p: polynomial_spec(&f.p)?,
            q: polynomial_spec(&f.q)?,
            v0: f.v0.to_spec(),
            points,
            kappa_trace: f.kappa_trace.clone(),
        };
        write_json(path, &file)?;
    }
    Ok(())
}

fn realize(file: &Path, out: &Path, method: Method, config: RealizeConfig) -> Outcome {
    let v = load_function(file)?;
    let c = match method {
        Method::Rkps => realize::realize_rkps(&v, &config)?,
        Method::Pf => realize::pf_realize(&v)?,
    };
    let check = c.validate(1e-8);
    let inertia = indefinite::inertia(c.metric().matrix(), indefinite::default_tol(c.n()))?;
    println!(
        "n={} m={} metric inertia (+{}, -{}) identity residual {:.3e}",
        c.n(),
        c.m(),
        inertia.n_plus,
        inertia.n_minus,
        check.identity_residual
    );
    if !check.passes {
        return Err(Failure::Inconsistent(format!(
            "colligation identity fails: residual {:.3e}",
            check.identity_residual
        )));
    }
    write(out, &nio::colligation_to_json(&c)?)
}

#[derive(Serialize)]
struct Evaluation {
    z: [f64; 2],
    /// `null` where `z` is in the spectrum of the state operator.
    value: Option<JsonMatrix>,
}

#[derive(Serialize)]
struct EvaluationFile {
    format: u32,
    function: &'static str,
    values: Vec<Evaluation>,
}

fn evaluate(model: &Path, args: &PointArgs, out: Option<&Path>, which: &'static str) -> Outcome {
    let c = load_model(model)?;
    let points = load_points(args)?;
    let mut values = Vec::with_capacity(points.len());
    for z in points {
        let value = if which == "W" { c.transfer_w(z) } else { c.impedance_v(z) };
        match &value {
            Ok(m) if m.len() == 1 => println!("{which}({}) = {}", fmt_c(z), fmt_c(m[(0, 0)])),
            Ok(m) => {
                println!("{which}({}) =", fmt_c(z));
                for row in m.row_iter() {
                    let cells: Vec<String> = row.iter().map(|x| fmt_c(*x)).collect();
                    println!("  [{}]", cells.join(", "));
                }
            }
            Err(e) => println!("{which}({}) undefined: {e}", fmt_c(z)),
        }
        values.push(Evaluation { z: [z.re, z.im], value: value.ok().map(|m| nio::matrix_to_json(&m)) });
    }
    if let Some(path) = out {
        write_json(path, &EvaluationFile { format: 1, function: which, values })?;
    }
    Ok(())
}

fn verify(file: &Path, model: &Path, count: usize, tol: f64, seed: u64, out: Option<&Path>) -> Outcome {
    if count == 0 {
        return Err(Failure::Usage("--points must be positive".into()));
    }
    let v = load_function(file)?;
    let c = load_model(model)?;
    if c.m() != v.dim() {
        return Err(Failure::Inconsistent(format!(
            "model has {} channels but the function is {}×{}",
            c.m(),
            v.dim(),
            v.dim()
        )));
    }
    // Offset the stream so held-out points differ from the ones the
    // kernel estimator draws with the same seed.
    let points = kernel::sample_points::<f64>(count, seed ^ 0x5EED_F00D);
    let report = realize::roundtrip_verify(&v, &c, &points, tol);
    println!(
        "{}: max relative error {:.3e} at {}, kernel identity {:.3e}, κ metric {} vs kernel {}{}, minimal {}",
        if report.passes { "PASS" } else { "FAIL" },
        report.max_impedance_error,
        fmt_c(Complex64::new(report.worst_point[0], report.worst_point[1])),
        report.kernel_identity_residual,
        report.kappa_metric,
        report.kappa_kernel,
        if report.kappa_stabilized { "" } else { " (not stabilized)" },
        report.minimal
    );
    if report.evaluation_failures > 0 {
        println!("  {} points could not be evaluated", report.evaluation_failures);
    }
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    if report.passes {
        Ok(())
    } else {
        Err(Failure::Inconsistent(format!("model does not reproduce the function within {tol:e}")))
    }
}

fn schur(gamma: f64, d: f64, nodes: usize, out: Option<&Path>, z: &[String]) -> Outcome {
    if nodes == 0 {
        return Err(Failure::Usage("--nodes must be positive".into()));
    }
    let system = example2_system(gamma, d, nodes)?;
    let exact = MatrixFunction64::example2(gamma, d)?;
    println!("state dimension {} (quadrature nodes {nodes}, γ={gamma}, d={d})", system.n0() + system.p());
    for s in z {
        let z = parse_complex(s)?;
        let model = system.impedance(z)?[(0, 0)];
        let closed = exact.eval(z)?[(0, 0)];
        println!(
            "V({}) = {}  closed form {}  |difference| {:.3e}",
            fmt_c(z),
            fmt_c(model),
            fmt_c(closed),
            (model - closed).norm()
        );
    }
    if let Some(path) = out {
        write(path, &nio::colligation_to_json(&system.colligation()?)?)?;
    }
    Ok(())
}

/// CSV of the `z = iy` sweep. Column names say which condition they trace:
/// `growth` is `(V(iy)f,f)/y`, `decay` is `y·Im(V(iy)f,f)` and `strict` is
/// `|V(iy)f|`, one group per basis direction `f_k`.
fn scan_csv(rows: &[ScanRow], dim: usize) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["y".to_string()];
    for k in 0..dim {
        header.push(format!("growth_re_f{k}"));
        header.push(format!("growth_im_f{k}"));
        header.push(format!("decay_f{k}"));
        header.push(format!("strict_f{k}"));
    }
    header.push("status".into());
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![format!("{:.16e}", row.y)];
        match &row.samples {
            Some(samples) => {
                for s in samples {
                    record.push(format!("{:.16e}", s.v_over_y[0]));
                    record.push(format!("{:.16e}", s.v_over_y[1]));
                    record.push(format!("{:.16e}", s.y_im));
                    record.push(format!("{:.16e}", s.abs_vf));
                }
                record.push("ok".into());
            }
            None => {
                record.extend(std::iter::repeat_n(String::new(), 4 * dim));
                record.push("pole".into());
            }
        }
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Usage(format!("csv: {e}")))
}

fn scan(file: &Path, axis: &AxisArgs, out: Option<&Path>) -> Outcome {
    let v = load_function(file)?;
    let kernel = KernelArgs { seed: None, kernel_grid_start: 6, kernel_grid_max: 192, tol: None };
    let config = classify_config(&kernel, axis)?;
    let rows = classify::scan(&v, &config);
    let text = scan_csv(&rows, v.dim())?;
    match out {
        Some(path) => {
            let poles = rows.iter().filter(|r| r.samples.is_none()).count();
            println!("{} rows, {} at poles", rows.len(), poles);
            write(path, &text)
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn corpus(dir: &Path, config: &CorpusConfig) -> Outcome {
    let manifest = corpus::generate(config)?;
    let kernel = KernelConfig { seed: config.seed, ..KernelConfig::default() };
    let mut mismatches = Vec::new();
    for entry in &manifest.entries {
        let v = entry.function::<f64>()?;
        write(&dir.join(format!("{}.json", entry.name)), &nio::to_json(&v.to_file())?)?;
        let est = kernel::negative_squares(&v, &kernel)?;
        println!(
            "{}: intended κ={} measured κ={}{} (deg p={}, deg q={}, {} poles)",
            entry.name,
            entry.kappa,
            est.kappa,
            if est.stabilized { "" } else { " not stabilized" },
            entry.deg_p,
            entry.deg_q,
            entry.poles.len()
        );
        if est.kappa != entry.kappa || !est.stabilized {
            mismatches.push(entry.name.clone());
        }
    }
    write_json(&dir.join("manifest.json"), &manifest)?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Inconsistent(format!("measured κ differs from the manifest for {}", mismatches.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_syntax() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex(" 1 - 2.5i ").unwrap(), c(1.0, -2.5));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("-3").unwrap(), c(-3.0, 0.0));
        assert_eq!(parse_complex("1e-3+1e2i").unwrap(), c(1e-3, 100.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("i2").is_err());
    }

    #[test]
    fn seed_syntax() {
        assert_eq!(parse_seed("20043"), Some(0x4E4B));
        assert_eq!(parse_seed(" 0x4e4b "), Some(0x4E4B));
        assert_eq!(parse_seed("seed"), None);
    }
}
