//! Command-line front end: argument parsing, configuration files and CSV
//! emission. `main` only forwards to [`run`].

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::beams::{emit_profiles, BeamFamily};
use crate::error::Error;
use crate::orthogonality::{gram_matrix, gram_table, WeightSpec};
use crate::pde_maps::{heat_kernel, heat_polynomial, sz_from_heat, Grid};
use crate::profiles::YProfile;
use crate::table::{linspace, Table};
use crate::umbral_solver::{
    evolve_series, ide_residual_pointwise, lift_and_sample, snapshot_residual, Basis, OperatorWord, SeriesSnapshot,
    UmbralSeries,
};
use crate::verify::{run_suite, Precision, Suite};

/// Environment variable selecting the arithmetic of `verify`.
pub const PRECISION_ENV: &str = "UMBRAL_PRECISION";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_TRUNCATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "umbral", version, about = "Ladder-operator eigenfunctions, beam modes, umbral IDE solver and PDE maps")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key=value` file; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized beam modes Phi_n (or intensities) as CSV.
    Modes(ModesArgs),
    /// Run invariant suites and print PASS/FAIL per check.
    Verify(VerifyArgs),
    /// Umbral series solution of f_tau = F f as CSV (tau, x, f, residual).
    SolveIde(SolveIdeArgs),
    /// Sunyaev-Zeldovich solutions from heat solutions as CSV (xi, tau, w).
    Sz(SzArgs),
    /// Gram matrix of the ladder eigenfunctions as CSV (i, j, value).
    Gram(GramArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ModesArgs {
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = -1.0)]
    pub y: f64,
    /// Mode indices, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 3.0)]
    pub xmax: f64,
    #[arg(long, default_value_t = 301)]
    pub points: usize,
    /// Emit |Phi_n|^2 instead of Phi_n.
    #[arg(long)]
    pub squared: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Ladder,
    Ortho,
    Pde,
    Ide,
    Beams,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Ladder => Suite::Ladder,
            SuiteArg::Ortho => Suite::Ortho,
            SuiteArg::Pde => Suite::Pde,
            SuiteArg::Ide => Suite::Ide,
            SuiteArg::Beams => Suite::Beams,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveIdeArgs {
    /// Use the closed-form solution of F = P+M instead of integrating.
    #[arg(long)]
    pub example: bool,
    /// Output times, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    pub tau: Vec<f64>,
    /// Truncation index.
    #[arg(long = "N", default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = -1.0)]
    pub k0: f64,
    #[arg(long, default_value_t = 2.0)]
    pub xmax: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// Largest allowed |c_N| over the output times.
    #[arg(long = "tail-tol", default_value_t = 1e-10)]
    pub tail_tol: f64,
    /// Operator word F, e.g. "P+M" or "0.5*MP - 2*P".
    #[arg(long, default_value = "P+M")]
    pub word: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SzInit {
    HeatKernel,
    Constant,
    HeatPoly,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SzArgs {
    /// Heat-equation solution to transform.
    #[arg(long, value_enum, default_value = "heat-kernel")]
    pub init: SzInit,
    /// Degree for `--init heat-poly`.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub tau: Vec<f64>,
    #[arg(long = "xi-min", default_value_t = 0.5)]
    pub xi_min: f64,
    #[arg(long = "xi-max", default_value_t = 3.0)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 26)]
    pub points: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GramFamily {
    Bare,
    Prefactored,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GramArgs {
    #[arg(long, value_enum, default_value = "bare")]
    pub family: GramFamily,
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = -1.0)]
    pub k0: f64,
    /// Ladder parameter of the prefactored family (profile Y' = A x^q).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub nmax: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Params(String),
    Io(String),
    Truncation(String),
    Verify,
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Params(_) => EXIT_PARAMS,
            CliError::Io(_) => EXIT_IO,
            CliError::Truncation(_) => EXIT_TRUNCATION,
            CliError::Verify | CliError::Numeric(_) => EXIT_VERIFY,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Params(m) | CliError::Io(m) | CliError::Truncation(m) | CliError::Numeric(m) => f.write_str(m),
            CliError::Verify => f.write_str("verification failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => CliError::Params(m),
            Error::TruncationTail { .. } => CliError::Truncation(e.to_string()),
            Error::DivisionByZero { .. } | Error::SingularPoint { .. } | Error::Domain(_) | Error::GridTooCoarse { .. } => {
                CliError::Params(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses a flat `key=value` file into `--key value` arguments. Blank lines
/// and `#` comments are skipped; `true`/`false` toggle switches.
pub fn config_args(text: &str) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| CliError::Params(format!("config line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(CliError::Params(format!("config line {}: empty key", i + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}

/// Pulls `--config FILE` out of `args` and splices the file's flags in right
/// after the subcommand, ahead of the user's own flags.
fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Params("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let extra = config_args(&text)?;
    let at = rest.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|p| p + 2).unwrap_or(rest.len());
    rest.splice(at..at, extra.into_iter().map(OsString::from));
    Ok(rest)
}

fn emit(table: &Table, output: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(p) => table.write_csv(p).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(table.to_csv().as_bytes()).map_err(|e| CliError::Io(format!("cannot write output: {e}"))),
    }
}

fn require(cond: bool, msg: impl Into<String>) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Params(msg.into()))
    }
}

pub fn cmd_modes(args: &ModesArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let family = BeamFamily::new(args.q, args.a, args.y)?;
    require(args.xmax > 0.0, "xmax must be positive")?;
    require(args.points >= 2, "points must be at least 2")?;
    let table = emit_profiles(&args.n, &family, &linspace(0.0, args.xmax, args.points), args.squared)?;
    emit(&table, args.output.as_deref(), stdout)
}

/// Arithmetic named by [`PRECISION_ENV`]; rational when unset.
pub fn precision_from_env() -> CliResult<Precision> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v.parse().map_err(|e: Error| CliError::Params(e.to_string())),
        Err(_) => Ok(Precision::Rational),
    }
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let precision = precision_from_env()?;
    let report = run_suite(args.suite.into(), precision);
    writeln!(stdout, "precision: {precision:?}\n{report}").map_err(|e| CliError::Io(e.to_string()))?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verify)
    }
}

pub fn cmd_solve_ide(args: &SolveIdeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let word = OperatorWord::parse(&args.word)?;
    let basis = Basis::bare_power_law(args.q, args.a, args.k0)?;
    require(args.points >= 1, "points must be at least 1")?;
    require(args.xmax >= 0.0, "xmax must be non-negative")?;
    require(!args.tau.is_empty(), "need at least one tau")?;
    let is_example_word = word.to_string() == "P+M" || word.to_string() == "M+P";
    let series = if args.example {
        require(is_example_word, format!("the closed-form example solves F = P+M, not {word}"))?;
        UmbralSeries::example(basis.clone(), args.n, &args.tau)
    } else {
        let mut snaps: Vec<SeriesSnapshot> = Vec::with_capacity(args.tau.len());
        for &tau in &args.tau {
            let run = evolve_series(basis.clone(), &word, &[1.0], tau, args.n)?;
            snaps.push(run.last().cloned().expect("evolution has a start point"));
        }
        UmbralSeries::from_snapshots(basis.clone(), args.n, snaps)?
    };
    series.check_tail(args.tail_tol)?;
    let xs = linspace(0.0, args.xmax, args.points);
    let mut table = Table::new(["tau", "x", "f", "residual"]);
    for s in series.samples() {
        let f = lift_and_sample(&basis, &s.coeffs, &xs)?;
        let residual = if is_example_word {
            ide_residual_pointwise(&basis, s, &xs)?
        } else {
            // no pointwise form for a general word: lift the coefficient residual
            let mut r = snapshot_residual(s, &word);
            r.truncate(args.n);
            lift_and_sample(&basis, &r, &xs)?.into_iter().map(f64::abs).collect()
        };
        for i in 0..xs.len() {
            table.push(vec![s.tau, xs[i], f[i], residual[i]]);
        }
    }
    emit(&table, args.output.as_deref(), stdout)
}

pub fn cmd_sz(args: &SzArgs, stdout: &mut dyn Write) -> CliResult<()> {
    require(args.xi_min > 0.0 && args.xi_max >= args.xi_min, "need 0 < xi-min <= xi-max")?;
    require(args.points >= 1, "points must be at least 1")?;
    require(args.tau.iter().all(|t| t.is_finite()), "tau must be finite")?;
    if args.init == SzInit::HeatKernel {
        require(args.tau.iter().all(|&t| t > 0.0), "the heat kernel needs tau > 0")?;
    }
    let grid = Grid { x: linspace(args.xi_min, args.xi_max, args.points), t: args.tau.clone() };
    let degree = args.degree;
    let solution = match args.init {
        SzInit::HeatKernel => sz_from_heat(heat_kernel, grid)?,
        SzInit::Constant => sz_from_heat(|_, _| 1.0, grid)?,
        SzInit::HeatPoly => sz_from_heat(|x, t| heat_polynomial(degree, x, t), grid)?,
    };
    emit(&solution.to_table(), args.output.as_deref(), stdout)
}

pub fn cmd_gram(args: &GramArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = match args.family {
        GramFamily::Bare => WeightSpec::bare(args.q, args.a, args.k0)?,
        GramFamily::Prefactored => WeightSpec::prefactored(args.alpha, args.k0, YProfile::power_law(args.a, args.q, 0.0)?)?,
    };
    let g = gram_matrix(&spec, args.nmax)?;
    emit(&gram_table(&g), args.output.as_deref(), stdout)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Modes(a) => cmd_modes(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::SolveIde(a) => cmd_solve_ide(a, stdout),
        Command::Sz(a) => cmd_sz(a, stdout),
        Command::Gram(a) => cmd_gram(a, stdout),
    }
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code. Errors go to `stderr`.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_PARAMS
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run`] on the process arguments and standard streams.
pub fn main_exit_code() -> i32 {
    let out = io::stdout();
    let err = io::stderr();
    run(std::env::args_os().collect(), &mut out.lock(), &mut err.lock())
}
