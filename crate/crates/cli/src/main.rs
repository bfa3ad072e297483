use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use csa_core::antieig::{antilinear_eigensystem, pseudospectrum, resolvent_norm, GridSpec};
use csa_core::antilinear::pauli_ops::c2_blocks;
use csa_core::antilinear::CLASSIFY_TOL;
use csa_core::csa::{check_c_selfadjoint, generate_csa};
use csa_core::decomp::{refined_polar, refined_svd};
use csa_core::matrix::{conj, fro, haar_unitary, matrix_from_json, matrix_to_json};
use csa_core::modelspaces::{
    build_t, check_condition_and, conjugation_c_alphabeta, conjugation_c_gamma,
    example2_conjugation, theta_condition_check, SymbolCoeffs,
};
use csa_core::pauli::{distance_to_closed_form, spectrum_sample, symmetric_grid};
use csa_core::{AntiunitaryOp, CMatrix, Error, Tolerance};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Checks, decompositions and spectra for operators with an antiunitary
/// symmetry.
#[derive(Parser)]
#[command(name = "csa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Absolute tolerance for symmetry and rank decisions.
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    /// Relative tolerance, scaled by the Frobenius norm of the input.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
}

#[derive(Args)]
struct Operator {
    /// Matrix JSON: {"rows": n, "cols": n, "data": [[re, im], ...]}.
    #[arg(long = "H", value_name = "FILE")]
    h: PathBuf,
    /// Antiunitary JSON: {"kind": "antiunitary", "unitary_part": <matrix>}.
    #[arg(long = "C", value_name = "FILE")]
    c: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Residual of CHC⁻¹ = H†. Exits with status 1 if it fails.
    Check {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// H = C⁻¹J|H| with J = CU commuting with |H|.
    Polar {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// H = Σ σⱼ (C⁻¹φⱼ) φⱼ† with Jφⱼ = φⱼ.
    RefinedSvd {
        #[command(flatten)]
        op: Operator,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solutions of (H − z)ψ = λCψ with λ ≥ 0.
    AntiEig {
        #[command(flatten)]
        op: Operator,
        /// Shift as "re,im".
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Complex64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Resolvent norm on a grid, as CSV.
    Pseudospec {
        #[arg(long = "H", value_name = "FILE")]
        h: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Bounds as "re_min,re_max,im_min,im_max".
        #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
        grid: [f64; 4],
        /// Points per axis.
        #[arg(long, default_value_t = 100)]
        res: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues of the 2×2 symbol on a symmetric momentum grid, as CSV.
    PauliSpectrum {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        kmax: f64,
        #[arg(long, default_value_t = 601)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Conjugations and Toeplitz-type operators on polynomial model spaces.
    ModelSpace {
        #[arg(long, value_enum)]
        kind: ModelKind,
        /// Model space dimension.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        xi: f64,
        /// Symbol JSON: {"fourier": {"-2": [re, im], ...}}.
        #[arg(long)]
        phi1: Option<PathBuf>,
        #[arg(long)]
        phi2: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// A random C-self-adjoint matrix.
    GenCsa {
        #[arg(long, value_enum, default_value_t = ConjKind::K, conflicts_with = "c")]
        conj: ConjKind,
        /// Use this antiunitary instead of a built-in one.
        #[arg(long = "C", value_name = "FILE")]
        c: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the antiunitary used.
        #[arg(long, value_name = "FILE")]
        conj_output: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    /// Reverse-and-conjugate on K_{z^n}.
    CGamma,
    /// The two-inner-function conjugation on K_{z^{p+q}}.
    CAlphabeta,
    /// The pairwise conjugation with C² = −I.
    Example2,
    /// Compression of T_{φ₁,φ₂} to K_{z^n}.
    Toeplitz,
    /// Whether φ₁ satisfies θ(z̄) = θ(−z̄) = conj(θ(z)).
    Theta,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConjKind {
    /// Complex conjugation.
    K,
    /// Direct sum of −iσ₂K blocks; needs an even dimension.
    C2Blocks,
    /// Antidiagonal reversal.
    CGamma,
    /// Pairwise conjugation with C² = −I; needs an even dimension.
    Example2,
    /// Haar-random unitary part drawn from the seed.
    Haar,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts = parse_floats(s)?;
    match parts[..] {
        [re, im] => Ok(Complex64::new(re, im)),
        [re] => Ok(Complex64::new(re, 0.0)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

fn parse_grid(s: &str) -> Result<[f64; 4], String> {
    parse_floats(s)?
        .try_into()
        .map_err(|_| format!("expected four comma-separated bounds, got {s:?}"))
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_matrix(path: &Path) -> anyhow::Result<CMatrix> {
    matrix_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_conjugation(path: &Path) -> anyhow::Result<AntiunitaryOp> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_symbol(path: Option<&PathBuf>, flag: &str) -> anyhow::Result<SymbolCoeffs> {
    let Some(path) = path else {
        bail!(Error::Malformed(format!("--{flag} is required for this kind")));
    };
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Writes `data` to `output` and prints `summary`, or prints `data` alone
/// when no output file is given.
fn emit(output: Option<&PathBuf>, data: &str, summary: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            fs::write(path, data).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary}");
        }
        None => print!("{data}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

fn tolerance(cli: &Cli) -> anyhow::Result<Tolerance> {
    let d = Tolerance::default();
    Ok(Tolerance::new(cli.tol_abs.unwrap_or(d.abs), cli.tol_rel.unwrap_or(d.rel))?)
}

fn built_in(kind: ConjKind, dim: usize, seed: u64) -> anyhow::Result<AntiunitaryOp> {
    Ok(match kind {
        ConjKind::K => AntiunitaryOp::conjugation(dim),
        ConjKind::C2Blocks => {
            if dim % 2 == 1 {
                return Err(Error::OddDimension(dim).into());
            }
            c2_blocks(dim / 2)
        }
        ConjKind::CGamma => conjugation_c_gamma(dim),
        ConjKind::Example2 => example2_conjugation(dim)?,
        ConjKind::Haar => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            AntiunitaryOp::new(haar_unitary(&mut rng, dim))?
        }
    })
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let tol = tolerance(cli)?;
    match &cli.command {
        Command::Check { op, output } => {
            let (h, c) = (read_matrix(&op.h)?, read_conjugation(&op.c)?);
            let report = check_c_selfadjoint(&h, &c, tol)?;
            let summary = format!("residual={:e} is_csa={}", report.residual, report.is_csa);
            emit(output.as_ref(), &to_json(&report), &summary)?;
            if !report.is_csa {
                return Err(Error::NotCsa {
                    residual: report.residual,
                }
                .into());
            }
        }
        Command::Polar { op, output } => {
            let (h, c) = (read_matrix(&op.h)?, read_conjugation(&op.c)?);
            let p = refined_polar(&h, &c, tol)?;
            let factored = c.unitary_part().transpose() * conj(p.j.matrix()) * &p.abs_h;
            let summary = format!(
                "rank={} reconstruction={:e} commutation={:e}",
                p.range.ncols(),
                fro(&(&h - factored)),
                p.commutation_residual()
            );
            emit(output.as_ref(), &to_json(&p), &summary)?;
        }
        Command::RefinedSvd { op, output } => {
            let (h, c) = (read_matrix(&op.h)?, read_conjugation(&op.c)?);
            let s = refined_svd(&h, &c, tol)?;
            let summary = format!(
                "singular_values={} reconstruction={:e}",
                s.sigmas.len(),
                fro(&(s.reconstruct(h.nrows()) - &h))
            );
            emit(output.as_ref(), &to_json(&s), &summary)?;
        }
        Command::AntiEig { op, z, output } => {
            let (h, c) = (read_matrix(&op.h)?, read_conjugation(&op.c)?);
            let sys = antilinear_eigensystem(&h, &c, *z, tol)?;
            let summary = format!(
                "lambda_1={:e} resolvent_norm={:e} max_residual={:e}",
                sys.lambdas[0],
                resolvent_norm(&h, *z)?,
                sys.max_residual(&h, &c)?
            );
            emit(output.as_ref(), &to_json(&sys), &summary)?;
        }
        Command::Pseudospec {
            h,
            epsilon,
            grid,
            res,
            output,
        } => {
            let h = read_matrix(h)?;
            let spec = GridSpec {
                re_min: grid[0],
                re_max: grid[1],
                im_min: grid[2],
                im_max: grid[3],
                res: *res,
            };
            let g = pseudospectrum(&h, *epsilon, &spec)?;
            let summary = format!("points={} marked={}", g.points.len(), g.marked());
            emit(output.as_ref(), &g.to_csv(), &summary)?;
        }
        Command::PauliSpectrum {
            alpha,
            kmax,
            n,
            output,
        } => {
            if *n < 2 || !kmax.is_finite() || *kmax <= 0.0 {
                return Err(Error::Malformed("need --n ≥ 2 and --kmax > 0".into()).into());
            }
            let s = spectrum_sample(*alpha, &symmetric_grid(*kmax, *n));
            let min_re = s.all().map(|l| l.re).fold(f64::INFINITY, f64::min);
            let dist = s
                .all()
                .map(|l| distance_to_closed_form(*alpha, l))
                .fold(0.0, f64::max);
            let summary = format!(
                "points={} min_re={min_re} max_distance_to_closed_form={dist:e}",
                s.k_grid.len()
            );
            emit(output.as_ref(), &s.to_csv(), &summary)?;
        }
        Command::ModelSpace {
            kind,
            n,
            p,
            q,
            xi,
            phi1,
            phi2,
            output,
        } => model_space(*kind, *n, (*p, *q, *xi), phi1.as_ref(), phi2.as_ref(), output.as_ref(), tol)?,
        Command::GenCsa {
            conj,
            c,
            dim,
            seed,
            conj_output,
            output,
        } => {
            let op = match c {
                Some(path) => read_conjugation(path)?,
                None => built_in(*conj, *dim, *seed)?,
            };
            let h = generate_csa(&op, *seed)?;
            if let Some(path) = conj_output {
                fs::write(path, to_json(&op))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let report = check_c_selfadjoint(&h, &op, tol)?;
            let summary = format!("dim={} residual={:e}", op.dim(), report.residual);
            emit(output.as_ref(), &(matrix_to_json(&h) + "\n"), &summary)?;
        }
    }
    Ok(())
}

fn model_space(
    kind: ModelKind,
    n: usize,
    (p, q, xi): (usize, usize, f64),
    phi1: Option<&PathBuf>,
    phi2: Option<&PathBuf>,
    output: Option<&PathBuf>,
    tol: Tolerance,
) -> anyhow::Result<()> {
    let describe = |c: &AntiunitaryOp| format!("dim={} class={:?}", c.dim(), c.classify(CLASSIFY_TOL));
    let positive = |v: usize, flag: &str| -> anyhow::Result<()> {
        if v == 0 {
            bail!(Error::Malformed(format!("--{flag} must be at least 1")));
        }
        Ok(())
    };
    match kind {
        ModelKind::CGamma => {
            positive(n, "n")?;
            let c = conjugation_c_gamma(n);
            emit(output, &to_json(&c), &describe(&c))
        }
        ModelKind::CAlphabeta => {
            positive(p, "p")?;
            positive(q, "q")?;
            let c = conjugation_c_alphabeta(p, q, xi);
            emit(output, &to_json(&c), &describe(&c))
        }
        ModelKind::Example2 => {
            let c = example2_conjugation(n)?;
            emit(output, &to_json(&c), &describe(&c))
        }
        ModelKind::Toeplitz => {
            let (f1, f2) = (read_symbol(phi1, "phi1")?, read_symbol(phi2, "phi2")?);
            let t = build_t(&f1, &f2, n)?;
            let condition = check_condition_and(&f1, &f2, tol);
            let residual = match example2_conjugation(n) {
                Ok(c) => format!("{:e}", check_c_selfadjoint(&t, &c, tol)?.residual),
                Err(_) => "n/a".into(),
            };
            let summary = format!("dim={n} condition_and={condition} example2_residual={residual}");
            emit(output, &(matrix_to_json(&t) + "\n"), &summary)
        }
        ModelKind::Theta => {
            let theta = read_symbol(phi1, "phi1")?;
            let holds = theta_condition_check(&theta)?;
            let data = to_json(&serde_json::json!({ "theta_condition": holds }));
            emit(output, &data, &format!("theta_condition={holds}"))
        }
    }
}

/// 1 for failures of the mathematics (not C-self-adjoint, degenerate,
/// z in the spectrum, …), 2 for unreadable or inconsistent input.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Malformed(_)
            | Error::InvalidTolerance { .. }
            | Error::NonFinite
            | Error::NotSquare { .. }
            | Error::DimMismatch { .. }
            | Error::NotUnitary { .. },
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
