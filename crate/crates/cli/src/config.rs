//! Command-line arguments and their validation into a run configuration.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_core::heun::{KBranch, DEFAULT_ZETA_STAR};
use rabi_core::model::DEFAULT_REGIME_TOL;
use rabi_core::rootfind::THREADS_ENV;
use rabi_core::spectrum::check_gluing_point;
use rabi_core::{classify_regime, validate_params, Error, Method, ModelParams, Regime};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "rabi-spectra", version, about = "Spectra, determinant scans and diagnostics of the generalized Rabi model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels in a window, one row per level.
    Spectrum(RunArgs),
    /// The spectral determinant sampled on the scan grid.
    Gscan(RunArgs),
    /// Recurrence audit, coefficient cross-checks, residuals and oracle convergence.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Oracle,
    Closed,
    Heun,
    Bcf,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KBranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.6, allow_hyphen_values = true)]
    pub g: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub emin: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub emax: f64,
    /// Scan grid step, in units of omega.
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub grid: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Highest oscillator index per branch of the closed form.
    #[arg(long, default_value_t = 9)]
    pub nmax: usize,
    /// Highest photon number of the truncated Fock basis.
    #[arg(long, default_value_t = 120)]
    pub fock_cutoff: usize,
    /// Adds the distance to the nearest oracle level.
    #[arg(long)]
    pub compare_oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gluing point of the two local series.
    #[arg(long, default_value_t = DEFAULT_ZETA_STAR, allow_hyphen_values = true)]
    pub zeta_star: f64,
    #[arg(long, value_enum, default_value_t = KBranchArg::Minus)]
    pub k_branch: KBranchArg,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Perturbs every checked equation so that the residual checks must fail.
    #[arg(long)]
    pub self_test: bool,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Core(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Core(e) if is_validation(e) => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Errors caused by the request rather than by the numerics.
pub fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::NonPositiveOmega(_)
            | Error::SqueezeTooStrong { .. }
            | Error::NonFinite(_)
            | Error::LambdaZero
            | Error::LambdaNotZero(_)
            | Error::DeltaNotZero(_)
            | Error::GZero
            | Error::GNotZero(_)
            | Error::NegativeCutoff(_)
            | Error::TooManyLevels { .. }
            | Error::EvalPointOutOfDisk { .. }
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub e_min: f64,
    pub e_max: f64,
    pub grid: f64,
    pub requested: MethodArg,
    pub method: Method,
    pub nmax: usize,
    pub fock_cutoff: usize,
    pub compare_oracle: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub zeta_star: f64,
    pub k_branch: KBranch,
    pub threads: Option<usize>,
}

/// `closed` when `Δ = 0`, `heun` when `λ = 0`, `bcf` otherwise.
pub fn auto_method(p: &ModelParams) -> Method {
    match classify_regime(p, DEFAULT_REGIME_TOL) {
        Regime::Uncoupled => Method::Closed,
        Regime::Asymmetric => Method::Heun,
        Regime::TwoPhoton | Regime::General => Method::Bcf,
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|n| (n > 0).then_some(n))
            .map_err(|_| CliError::Invalid(format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}"))),
    }
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let params = validate_params(self.omega, self.delta, self.eps, self.g, self.lambda)?;
        for (name, v) in [("emin", self.emin), ("emax", self.emax), ("grid", self.grid), ("zeta-star", self.zeta_star)] {
            if !v.is_finite() {
                return Err(CliError::Invalid(format!("--{name} must be finite")));
            }
        }
        if self.emin > self.emax {
            return Err(CliError::Invalid(format!("--emin {} exceeds --emax {}", self.emin, self.emax)));
        }
        if self.grid <= 0.0 {
            return Err(CliError::Invalid(format!("--grid must be positive, got {}", self.grid)));
        }
        if self.fock_cutoff == 0 {
            return Err(CliError::Invalid("--fock-cutoff must be at least 1".into()));
        }
        check_gluing_point(self.zeta_star)?;
        let method = match self.method {
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Closed => Method::Closed,
            MethodArg::Heun => Method::Heun,
            MethodArg::Bcf => Method::Bcf,
            MethodArg::Auto => auto_method(&params),
        };
        Ok(RunConfig {
            params,
            e_min: self.emin,
            e_max: self.emax,
            grid: self.grid,
            requested: self.method,
            method,
            nmax: self.nmax,
            fock_cutoff: self.fock_cutoff,
            compare_oracle: self.compare_oracle,
            format: self.format,
            out: self.out.clone(),
            zeta_star: self.zeta_star,
            k_branch: match self.k_branch {
                KBranchArg::Plus => KBranch::Plus,
                KBranchArg::Minus => KBranch::Minus,
            },
            threads: threads_from_env()?,
        })
    }
}
