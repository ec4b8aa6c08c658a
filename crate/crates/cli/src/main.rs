//! `nkappa`: command-line front end for the `nkappa` library.

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nkappa", version, about = "Negative squares, realizability and colligation realizations of N_kappa functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings of the kernel stabilization loop.
#[derive(Debug, Clone, clap::Args)]
struct KernelArgs {
    /// Seed for the random sample points; NKAPPA_SEED takes precedence.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 6)]
    kernel_grid_start: usize,
    #[arg(long, default_value_t = 192)]
    kernel_grid_max: usize,
    /// Relative eigenvalue threshold (default 1e-10 times the direction count).
    #[arg(long)]
    tol: Option<f64>,
}

/// Geometric grid of the `z = iy` sweep.
#[derive(Debug, Clone, clap::Args)]
struct AxisArgs {
    #[arg(long, default_value_t = 10.0)]
    y_min: f64,
    #[arg(long, default_value_t = 1e6)]
    y_max: f64,
    #[arg(long, default_value_t = 8)]
    per_decade: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Reproducing-kernel model from sampled kernel sections.
    Rkps,
    /// Partial fractions with Jordan blocks at repeated poles.
    Pf,
}

/// Evaluation points given either inline or as a points file.
#[derive(Debug, Clone, clap::Args)]
#[group(required = true, multiple = false)]
struct PointArgs {
    /// Point as "a+bi"; may be repeated.
    #[arg(short = 'z', allow_hyphen_values = true)]
    z: Vec<String>,
    /// Points file {"format":1,"points":[[re,im],...]}.
    #[arg(long = "points")]
    points: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the number of negative squares of the kernel.
    Kappa {
        #[arg(short = 'f', long = "file")]
        file: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Write the estimate with its grid history as JSON.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Decide realizability and the subclass.
    Classify {
        #[arg(short = 'f', long = "file")]
        file: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        axis: AxisArgs,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Write the z = iy sweep as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Krein-Langer factorization of a scalar rational function.
    Factor {
        #[arg(short = 'f', long = "file")]
        file: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Build a colligation whose impedance is the given function.
    Realize {
        #[arg(short = 'f', long = "file")]
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Rkps)]
        method: Method,
        #[arg(long, default_value_t = 1e10)]
        cond_max: f64,
        #[arg(long, default_value_t = 5)]
        retries: usize,
    },
    /// Evaluate the transfer function W of a colligation.
    Transfer {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        #[command(flatten)]
        points: PointArgs,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Evaluate the impedance V of a colligation.
    Impedance {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        #[command(flatten)]
        points: PointArgs,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Compare a colligation against a function on held-out points.
    Verify {
        #[arg(short = 'f', long = "file")]
        file: PathBuf,
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        /// Number of held-out sample points.
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Block-operator model of the Chebyshev example and its impedance.
    Schur {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        d: f64,
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        /// Write the colligation as JSON.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Compare the model impedance with the closed form at these points.
        #[arg(short = 'z', allow_hyphen_values = true)]
        z: Vec<String>,
    },
    /// Sweep z = iy and write the growth, decay and strictness traces as CSV.
    Scan {
        #[arg(short = 'f', long = "file")]
        file: PathBuf,
        #[command(flatten)]
        axis: AxisArgs,
        /// CSV output; standard output when omitted.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Generate test functions with known negative index.
    Corpus {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 2)]
        max_kappa: usize,
        #[arg(long, default_value_t = 1)]
        min_poles: usize,
        #[arg(long, default_value_t = 4)]
        max_poles: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("nkappa: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
