use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nlk_core::ode_engine::{self, SecondSolutionMethod, SolutionTrajectory, TrajectoryOptions};
use nlk_core::{bubble, modes, Dimension, SpacePoint, Tolerances, VerificationReport, Verdict};
use rayon::prelude::*;
use serde::Serialize;

mod table;

/// Numerical certificate for the kernel of the linearized N-Laplace Liouville operator.
#[derive(Parser, Debug)]
#[command(name = "nlk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full verification suite and emit a report.
    Verify(VerifyArgs),
    /// Export the radial solutions of one spherical-harmonic mode.
    Modes(ModesArgs),
    /// Tabulate the bubble, its kernel elements and its mass.
    Bubble(BubbleArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Dimension N >= 2; repeat for several (default: 2 through 6)
    #[arg(long = "dim", value_name = "N")]
    dims: Vec<usize>,
    /// Largest spherical-harmonic degree examined
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Residual tolerance for closed-form and mode equations
    #[arg(long, default_value_t = 1e-8)]
    tol_residual: f64,
    /// Relative tolerance for growth exponents
    #[arg(long, default_value_t = 0.01)]
    tol_exponent: f64,
    /// Write primary output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ModesArgs {
    #[command(flatten)]
    common: Common,
    /// Mode index, 0 <= k <= kmax
    #[arg(long)]
    k: usize,
    /// For k = 0, 1: print the second (unbounded) solution instead of the
    /// regular one. With --out both are written.
    #[arg(long)]
    second: bool,
}

#[derive(Args, Debug)]
struct BubbleArgs {
    #[command(flatten)]
    common: Common,
    /// Number of log-spaced radii in [1e-3, 1e3]
    #[arg(long, default_value_t = 200)]
    points: usize,
}

/// Validated run configuration shared by all subcommands.
struct RunConfig {
    dims: Vec<Dimension>,
    k_max: usize,
    tolerances: Tolerances,
    out: Option<PathBuf>,
    format: Format,
    seed: u64,
}

impl RunConfig {
    fn from_args(c: &Common) -> Result<Self> {
        let raw = if c.dims.is_empty() { (2..=6).collect() } else { c.dims.clone() };
        let dims = raw.into_iter().map(Dimension::new).collect::<nlk_core::Result<Vec<_>>>()?;
        if !(2..=ode_engine::K_MAX_SUPPORTED).contains(&c.kmax) {
            bail!("--kmax must be between 2 and {}, got {}", ode_engine::K_MAX_SUPPORTED, c.kmax);
        }
        let tolerances = Tolerances {
            residual: c.tol_residual,
            exponent: c.tol_exponent,
            ..Tolerances::default()
        };
        tolerances.validate()?;
        Ok(Self {
            dims,
            k_max: c.kmax,
            tolerances,
            out: c.out.clone(),
            format: c.format,
            seed: c.seed,
        })
    }

    fn single_dim(&self, cmd: &str) -> Result<Dimension> {
        match self.dims.as_slice() {
            [d] => Ok(*d),
            _ => bail!("`{cmd}` needs exactly one --dim"),
        }
    }
}

/// A failure after parsing: bad configuration or I/O. Always exit 1.
struct UsageError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for UsageError {
    fn from(e: E) -> Self {
        Self(e.into())
    }
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 2,
        Verdict::Inconclusive => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Modes(a) => cmd_modes(a).map(|()| Verdict::Pass),
        Command::Bubble(a) => cmd_bubble(a).map(|()| Verdict::Pass),
    };
    match result {
        Ok(v) => ExitCode::from(exit_code(v)),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NLK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).with_context(|| format!("NLK_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

/// Writes to `--out` if given, otherwise to stdout.
fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    seed: u64,
    reports: &'a [VerificationReport],
    verdict: Verdict,
}

fn cmd_verify(args: &VerifyArgs) -> std::result::Result<Verdict, UsageError> {
    let cfg = RunConfig::from_args(&args.common)?;
    let reports = cfg
        .dims
        .par_iter()
        .map(|&n| nlk_core::full_report(n, cfg.k_max, &cfg.tolerances, cfg.seed))
        .collect::<nlk_core::Result<Vec<_>>>()?;
    let verdict = reports.iter().map(|r| r.verdict).fold(Verdict::Pass, Verdict::combine);
    for r in &reports {
        let kernel = r.kernel_dimension.map_or("withheld".to_string(), |d| d.to_string());
        eprintln!("n={}: verdict {:?}, kernel dimension {kernel}, {:.2?}", r.dimension, r.verdict, r.wall_time);
    }
    let body = match cfg.format {
        Format::Json => to_json(&VerifyDocument {
            seed: cfg.seed,
            reports: &reports,
            verdict,
        })?,
        Format::Csv => table::verify_csv(&reports),
    };
    emit(cfg.out.as_deref(), &body)?;
    Ok(verdict)
}

#[derive(Serialize)]
struct ModesDocument<'a> {
    dimension: usize,
    k: usize,
    lambda: f64,
    regular: &'a SolutionTrajectory,
    #[serde(skip_serializing_if = "Option::is_none")]
    second: Option<&'a SolutionTrajectory>,
}

/// `report.json` → `report.second.json`.
fn second_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.second.{}", ext.to_string_lossy()),
        None => format!("{stem}.second"),
    };
    path.with_file_name(name)
}

fn cmd_modes(args: &ModesArgs) -> std::result::Result<(), UsageError> {
    let cfg = RunConfig::from_args(&args.common)?;
    let n = cfg.single_dim("modes")?;
    let k = args.k;
    if k > cfg.k_max {
        return Err(anyhow::anyhow!("--k {k} exceeds --kmax {}", cfg.k_max).into());
    }
    if args.second && k > 1 {
        return Err(anyhow::anyhow!("--second is only available for k = 0 and k = 1").into());
    }
    let opts = TrajectoryOptions {
        rtol: cfg.tolerances.rtol,
        atol: cfg.tolerances.atol,
        ..TrajectoryOptions::default()
    };
    let (lo, hi) = ode_engine::default_range(k, n);
    let regular = ode_engine::integrate_regular(k, n, lo, hi, &opts)?;
    let second = if k <= 1 {
        Some(ode_engine::second_solution(k, n, SecondSolutionMethod::WronskianLaunch, (lo, hi), &opts)?)
    } else {
        None
    };

    match cfg.format {
        Format::Json => {
            let doc = ModesDocument {
                dimension: n.get(),
                k,
                lambda: modes::eigenvalue(k, n),
                regular: &regular,
                second: second.as_ref(),
            };
            emit(cfg.out.as_deref(), &to_json(&doc)?)?;
        }
        Format::Csv => match (&cfg.out, &second) {
            (Some(path), Some(sec)) => {
                emit(Some(path), &regular.to_csv())?;
                let extra = second_path(path);
                emit(Some(&extra), &sec.to_csv())?;
                eprintln!("second solution written to {}", extra.display());
            }
            _ => {
                let traj = if args.second { second.as_ref().expect("k <= 1 checked") } else { &regular };
                emit(cfg.out.as_deref(), &traj.to_csv())?;
            }
        },
    }
    Ok(())
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64),
        })
        .collect()
}

#[derive(Serialize)]
pub(crate) struct BubbleRow {
    r: f64,
    u: f64,
    du: f64,
    exp_u: f64,
    z0: f64,
    psi0: f64,
    psi1: f64,
}

#[derive(Serialize)]
pub(crate) struct BubbleTable {
    dimension: usize,
    mass: f64,
    mass_target: f64,
    rows: Vec<BubbleRow>,
}

fn bubble_table(n: Dimension, points: usize, mass_tol: f64) -> Result<BubbleTable> {
    let rows = log_grid(1e-3, 1e3, points)
        .into_iter()
        .map(|r| BubbleRow {
            r,
            u: bubble::u_radial(n, r),
            du: bubble::u_radial_derivative(n, r).value,
            exp_u: bubble::exp_u(n, r),
            z0: bubble::z0(n, &SpacePoint::on_axis(n, r)),
            psi0: modes::psi0(n, r).value,
            psi1: modes::psi1(n, r).value,
        })
        .collect();
    Ok(BubbleTable {
        dimension: n.get(),
        mass: bubble::mass_integral(n, mass_tol)?,
        mass_target: bubble::mass_target(n),
        rows,
    })
}

fn cmd_bubble(args: &BubbleArgs) -> std::result::Result<(), UsageError> {
    let cfg = RunConfig::from_args(&args.common)?;
    if args.points < 2 {
        return Err(anyhow::anyhow!("--points must be at least 2").into());
    }
    let tables = cfg
        .dims
        .par_iter()
        .map(|&n| bubble_table(n, args.points, cfg.tolerances.mass * 1e-2))
        .collect::<Result<Vec<_>>>()?;
    let body = match cfg.format {
        Format::Json => to_json(&tables)?,
        Format::Csv => table::bubble_csv(&tables),
    };
    emit(cfg.out.as_deref(), &body)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_output_keeps_the_extension() {
        assert_eq!(second_path(Path::new("out/m.csv")), PathBuf::from("out/m.second.csv"));
        assert_eq!(second_path(Path::new("m")), PathBuf::from("m.second"));
    }

    #[test]
    fn grid_hits_the_endpoints() {
        let g = log_grid(1e-3, 1e3, 7);
        assert_eq!((g[0], g[6]), (1e-3, 1e3));
        assert!((g[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn config_rejects_bad_input() {
        let parse = |args: &[&str]| {
            let cli = Cli::try_parse_from(args).unwrap();
            match cli.command {
                Command::Verify(a) => RunConfig::from_args(&a.common).map(|_| ()),
                _ => unreachable!(),
            }
        };
        assert!(parse(&["nlk", "verify", "--dim", "1"]).is_err());
        assert!(parse(&["nlk", "verify", "--kmax", "1"]).is_err());
        assert!(parse(&["nlk", "verify", "--tol-residual=-1"]).is_err());
        assert!(parse(&["nlk", "verify", "--dim", "3", "--dim", "4"]).is_ok());
    }
}
