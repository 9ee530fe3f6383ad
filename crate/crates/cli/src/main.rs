//! `algpath` command-line front end.
//!
//! Exit codes: 0 pass, 1 I/O, 2 membership, 3 bad parameter,
//! 4 matching or construction failure, 5 branch edge, 6 certificate failed.

mod formats;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use algpath::path::nearly_gate;
use algpath::random::tuple_with_spectrum;
use algpath::verify::row_seed;
use algpath::{
    certify_path, connect_cube, connect_disk, connect_nearly_algebraic, cpa_hermitian, cpa_normal,
    default_samples, uniformity_sweep, Error, MatrixPath64, MatrixTuple64, MultiPolySystem64, SetFamily,
    SweepConfig, SweepReport, Tolerances64, ZeroSet64,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use formats::{read_json, write_json, ConstraintFile, PathFile, TupleFile};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Param(String),
    Lib(Error),
    CertificateFailed(Vec<String>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Io(_) => 1,
            Self::Param(_) => 3,
            Self::CertificateFailed(_) => 6,
            Self::Lib(e) => match e {
                Error::NotMember(_)
                | Error::NotNearlyMember(_)
                | Error::NotInCube(_)
                | Error::NotInDisk(_)
                | Error::NotHermitian { .. }
                | Error::NotNormal { .. }
                | Error::NotCommuting { .. }
                | Error::NotCrossCommuting { .. }
                | Error::NoNearbyZero { .. } => 2,
                Error::DeltaTooLarge(_)
                | Error::SpectraOffZeroSet { .. }
                | Error::ClusterOverlap
                | Error::NotUnitary { .. }
                | Error::NotSkewHermitian { .. }
                | Error::NotCommutingOpus { .. }
                | Error::DiscontinuousJoin { .. } => 4,
                Error::BranchEdge { .. } => 5,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Param(m) => write!(f, "invalid parameter: {m}"),
            Self::Lib(e) => write!(f, "{e}"),
            Self::CertificateFailed(g) => write!(f, "certificate failed gates: {}", g.join(", ")),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "algpath", version, about = "Certified paths in algebraic matrix cubes and disks")]
struct Cli {
    /// JSON file with tolerance overrides (all five fields).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log informational messages to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Cube,
    Disk,
}

impl From<Family> for SetFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Cube => SetFamily::Cube,
            Family::Disk => SetFamily::Disk,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded random member (or near-member) of an algebraic set.
    Gen {
        #[arg(long)]
        n: usize,
        /// Number of components; defaults to the zero set's dimension.
        #[arg(long)]
        m: Option<usize>,
        /// Constraint file; defaults to the sign cube {-1, 1}^m.
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Move every joint eigenvalue towards 0 by at most this much.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantise the joint spectrum on a grid of spacing delta.
    Precondition {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Family::Cube)]
        family: Family,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build and certify a path from X to Y.
    Connect {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        common: CertArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Re-certify a stored path.
    Certify {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        common: CertArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Connect perturbed pairs across dimensions and write a CSV report.
    Sweep {
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Guaranteed bound on the distance of each pair.
        #[arg(long, default_value_t = 0.05)]
        magnitude: f64,
        #[arg(long, default_value_t = 129)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        cpa_delta: f64,
        /// Defaults to cube for real zero sets and disk otherwise.
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct CertArgs {
    #[arg(long)]
    constraints: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Family::Cube)]
    family: Family,
    /// Endpoints are only nearly algebraic.
    #[arg(long)]
    nearly: bool,
    /// Certificate samples; defaults to max(129, 64k + 1) for k segments.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Serialize)]
struct PreconditionReport {
    achieved_distance: f64,
    delta_used: f64,
    degrees: Vec<usize>,
    max_degree: usize,
}

fn tolerances(config: Option<&Path>) -> Result<Tolerances64, CliError> {
    match config {
        Some(p) => read_json(p),
        None => Ok(Tolerances64::default()),
    }
}

fn constraints(file: Option<&Path>, m: usize, tol: &Tolerances64) -> Result<(MultiPolySystem64, ZeroSet64), CliError> {
    match file {
        Some(p) => read_json::<ConstraintFile>(p)?.load(tol),
        None => ConstraintFile::sign_cube(m).load(tol),
    }
}

fn read_tuple(p: &Path) -> Result<MatrixTuple64, CliError> {
    read_json::<TupleFile>(p)?.to_tuple()
}

fn cmd_gen(
    n: usize,
    m: Option<usize>,
    zeros: Option<&Path>,
    seed: u64,
    perturb: f64,
    tol: &Tolerances64,
) -> Result<MatrixTuple64, CliError> {
    if n == 0 {
        return Err(CliError::Param("--n must be positive".into()));
    }
    if !(perturb >= 0.0 && perturb.is_finite()) {
        return Err(CliError::Param(format!("--perturb must be a finite non-negative number, got {perturb}")));
    }
    if zeros.is_none() && m.is_none() {
        return Err(CliError::Param("either --m or --zeros is required".into()));
    }
    let (_, z) = constraints(zeros, m.unwrap_or(0), tol)?;
    if let Some(m) = m.filter(|&m| m != z.dim()) {
        return Err(CliError::Param(format!("--m {m} does not match the zero set dimension {}", z.dim())));
    }
    // The perturbation has its own stream so the twin with --perturb 0
    // shares rows and eigenvectors.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shift = ChaCha8Rng::seed_from_u64(row_seed(seed, n) ^ 1);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            let p = &z.points()[rng.gen_range(0..z.len())];
            p.iter()
                .map(|&v| {
                    let r = v.norm();
                    let step = (perturb * shift.gen::<f64>()).min(r);
                    if step > 0.0 {
                        v * ((r - step) / r)
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Ok(tuple_with_spectrum(&rows, &mut rng))
}

fn build_path(
    x: &MatrixTuple64,
    y: &MatrixTuple64,
    sys: &MultiPolySystem64,
    z: &ZeroSet64,
    args: &CertArgs,
    tol: &Tolerances64,
) -> Result<MatrixPath64, CliError> {
    let family = SetFamily::from(args.family);
    let path = if args.nearly {
        connect_nearly_algebraic(x, y, sys, z, args.epsilon, family, tol)?
    } else {
        match family {
            SetFamily::Cube => connect_cube(x, y, sys, z, args.epsilon, tol)?,
            SetFamily::Disk => connect_disk(x, y, sys, z, args.epsilon, tol)?,
        }
    };
    Ok(path)
}

fn certify_and_write(
    path: &MatrixPath64,
    x: &MatrixTuple64,
    y: &MatrixTuple64,
    (sys, z): (&MultiPolySystem64, &ZeroSet64),
    args: &CertArgs,
    out: &Path,
    tol: &Tolerances64,
) -> Result<(), CliError> {
    let gate = if args.nearly { nearly_gate(z, args.epsilon) } else { 0.0 };
    let samples = args.samples.unwrap_or_else(|| default_samples(path));
    let cert = certify_path(path, x, y, Some((sys, gate)), args.epsilon, args.family.into(), samples, tol)?;
    write_json(out, &cert)?;
    if cert.passed() {
        Ok(())
    } else {
        Err(CliError::CertificateFailed(cert.failed_gates))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = tolerances(cli.config.as_deref())?;
    match cli.command {
        Command::Gen { n, m, zeros, seed, perturb, out } => {
            let x = cmd_gen(n, m, zeros.as_deref(), seed, perturb, &tol)?;
            write_json(&out, &TupleFile::from_tuple(&x))
        }
        Command::Precondition { input, delta, family, out, report } => {
            let x = read_tuple(&input)?;
            let res = match family {
                Family::Cube => cpa_hermitian(&x, delta, &tol)?,
                Family::Disk => cpa_normal(&x, delta, &tol)?,
            };
            write_json(&out, &TupleFile::from_tuple(&res.approximant))?;
            if let Some(r) = report {
                let rep = PreconditionReport {
                    achieved_distance: res.achieved_distance,
                    delta_used: res.delta_used,
                    degrees: res.minimal_polys.iter().map(|p| p.degree()).collect(),
                    max_degree: res.max_degree(),
                };
                write_json(&r, &rep)?;
            }
            log::info!("achieved distance {:e}, max degree {}", res.achieved_distance, res.max_degree());
            Ok(())
        }
        Command::Connect { x, y, common, out, cert } => {
            let (x, y) = (read_tuple(&x)?, read_tuple(&y)?);
            let (sys, z) = constraints(Some(&common.constraints), x.m(), &tol)?;
            let path = build_path(&x, &y, &sys, &z, &common, &tol)?;
            write_json(&out, &PathFile::from_path(&path))?;
            certify_and_write(&path, &x, &y, (&sys, &z), &common, &cert, &tol)
        }
        Command::Certify { path, x, y, common, out } => {
            let (x, y) = (read_tuple(&x)?, read_tuple(&y)?);
            let (sys, z) = constraints(Some(&common.constraints), x.m(), &tol)?;
            let path = read_json::<PathFile>(&path)?.to_path(&tol)?;
            certify_and_write(&path, &x, &y, (&sys, &z), &common, &out, &tol)
        }
        Command::Sweep { zeros, epsilon, dims, seed, magnitude, samples, cpa_delta, family, out } => {
            let (sys, z) = constraints(zeros.as_deref(), 1, &tol)?;
            let family = family.map(SetFamily::from).unwrap_or(if z.is_real(tol.tol_member) {
                SetFamily::Cube
            } else {
                SetFamily::Disk
            });
            let cfg = SweepConfig { epsilon, dims, seed, magnitude, samples, cpa_delta, family };
            let report = uniformity_sweep(&sys, &z, &cfg, &tol)?;
            write_csv(&out, &report)?;
            log::info!("sweep: {} rows, all success = {}", report.rows.len(), report.all_success());
            Ok(())
        }
    }
}

fn write_csv(out: &Path, report: &SweepReport) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", out.display()));
    let mut w = csv::Writer::from_path(out).map_err(io)?;
    w.write_record(SweepReport::CSV_HEADER).map_err(io)?;
    for rec in report.csv_records() {
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("algpath: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
