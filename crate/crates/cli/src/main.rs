//! `heunstep`: potential profiles, wavefunctions, transmission sweeps and a
//! self-check for the smooth asymmetric step.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod table;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heunstep::PhysicalConfig;
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(
    name = "heunstep",
    version,
    about = "Exactly solvable smooth potential step"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate x, z(x), dz/dx and V(x)
    #[command(alias = "transform", allow_negative_numbers = true)]
    Potential(PotentialArgs),
    /// Evaluate the analytic wavefunction on an x grid
    #[command(allow_negative_numbers = true)]
    Wavefunction(WavefunctionArgs),
    /// Transmission and reflection coefficients over an energy sweep
    #[command(allow_negative_numbers = true)]
    Transmission(TransmissionArgs),
    /// Run the analytic and numerical cross-checks
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct Physics {
    /// Energy origin
    #[arg(long, default_value_t = 0.0)]
    v0: f64,
    /// Step height
    #[arg(long, default_value_t = 1.0)]
    v1: f64,
    /// Steepness, repeatable; negative values give a step rising to the right
    #[arg(long)]
    sigma: Vec<f64>,
    /// Step position
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

impl Physics {
    fn configs(&self, default_sigmas: &[f64]) -> Result<Vec<PhysicalConfig>, CliError> {
        let sigmas = if self.sigma.is_empty() {
            default_sigmas
        } else {
            &self.sigma
        };
        sigmas
            .iter()
            .map(|&s| {
                PhysicalConfig::new(self.v0, self.v1, s, self.x0, self.mass, self.hbar)
                    .map_err(|e| CliError::Usage(e.to_string()))
            })
            .collect()
    }
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct XGrid {
    #[arg(long, default_value_t = -10.0)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 101)]
    x_count: usize,
}

impl XGrid {
    fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.x_count == 0 || !(self.x_min <= self.x_max) {
            return Err(CliError::Usage(format!(
                "x grid needs x-min <= x-max and x-count >= 1, got [{}, {}] x {}",
                self.x_min, self.x_max, self.x_count
            )));
        }
        Ok(heunstep::geometry::uniform_grid(
            self.x_min,
            self.x_max,
            self.x_count,
        ))
    }
}

#[derive(Args, Debug)]
struct PotentialArgs {
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    grid: XGrid,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct WavefunctionArgs {
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    grid: XGrid,
    #[arg(long)]
    energy: f64,
    /// Weight of u1, e.g. 0, 1.5 or 0.3-2i
    #[arg(long, default_value = "0")]
    c1: Complex64,
    /// Weight of u2
    #[arg(long, default_value = "1")]
    c2: Complex64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct TransmissionArgs {
    #[command(flatten)]
    physics: Physics,
    /// Single energy instead of a sweep
    #[arg(long, conflicts_with_all = ["energy_min", "energy_max", "energy_count"])]
    energy: Option<f64>,
    #[arg(long, default_value_t = 1.1)]
    energy_min: f64,
    #[arg(long, default_value_t = 6.0)]
    energy_max: f64,
    #[arg(long, default_value_t = 50)]
    energy_count: usize,
    /// Also integrate the Schrodinger equation numerically and compare
    #[arg(long)]
    oracle: bool,
    /// Override a tolerance, e.g. transmission=1e-5
    #[arg(long, value_name = "NAME=VAL")]
    tolerance: Vec<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Override a check tolerance, e.g. oracle_comparison=1e-5
    #[arg(long, value_name = "NAME=VAL")]
    tolerance: Vec<String>,
    /// Perturb the named check's input (negative control)
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Verification(String),
}

impl From<heunstep::Error> for CliError {
    fn from(e: heunstep::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Verification(m) => m,
        }
    }
}

/// Parses `NAME=VAL` overrides, rejecting names outside `known`.
pub fn parse_tolerances(raw: &[String], known: &[&str]) -> Result<Vec<(String, f64)>, CliError> {
    raw.iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("tolerance `{item}` is not NAME=VAL")))?;
            if !known.contains(&name) {
                return Err(CliError::Usage(format!(
                    "unknown tolerance `{name}`; expected one of {}",
                    known.join(", ")
                )));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| CliError::Usage(format!("tolerance `{item}` has a bad value")))?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Usage(format!(
                    "tolerance `{item}` must be positive"
                )));
            }
            Ok((name.to_string(), v))
        })
        .collect()
}

fn emit(
    out: &OutputArgs,
    default: Format,
    body: impl Fn(Format) -> String,
) -> Result<(), CliError> {
    let text = body(out.format.unwrap_or(default));
    match &out.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Potential(a) => {
            let cfgs = a.physics.configs(&[-1.0])?;
            let table = commands::potential(&cfgs, &a.grid.points()?);
            emit(&a.out, Format::Csv, |f| render(&table, f))
        }
        Command::Wavefunction(a) => {
            let cfgs = a.physics.configs(&[-1.0])?;
            let [cfg] = cfgs[..] else {
                return Err(CliError::Usage(
                    "wavefunction takes a single --sigma".into(),
                ));
            };
            let table = commands::wavefunction(&cfg, a.energy, a.c1, a.c2, &a.grid.points()?)?;
            emit(&a.out, Format::Csv, |f| render(&table, f))
        }
        Command::Transmission(a) => {
            let cfgs = a.physics.configs(&[-0.1, -0.25, -0.6])?;
            let energies = match a.energy {
                Some(e) => vec![e],
                None => {
                    if a.energy_count == 0 || !(a.energy_min <= a.energy_max) {
                        return Err(CliError::Usage(format!(
                            "energy range needs energy-min <= energy-max and energy-count >= 1, got [{}, {}] x {}",
                            a.energy_min, a.energy_max, a.energy_count
                        )));
                    }
                    heunstep::geometry::uniform_grid(a.energy_min, a.energy_max, a.energy_count)
                }
            };
            let tol = parse_tolerances(&a.tolerance, &["transmission"])?
                .last()
                .map_or(commands::ORACLE_TOLERANCE, |t| t.1);
            let sweep = commands::transmission_sweep(&cfgs, &energies, a.oracle)?;
            emit(&a.out, Format::Csv, |f| render(&sweep.table, f))?;
            if sweep.worst_difference > tol {
                return Err(CliError::Verification(format!(
                    "closed form and oracle differ by {:.3e} > {tol:e}",
                    sweep.worst_difference
                )));
            }
            Ok(())
        }
        Command::Verify(a) => {
            let overrides = parse_tolerances(&a.tolerance, verify::CHECK_NAMES)?;
            let report = verify::run(&overrides, a.inject_fault.as_deref())?;
            emit(&a.out, Format::Json, |f| match f {
                Format::Json => report.to_json(),
                Format::Csv => report.to_table().to_csv(),
            })?;
            if !report.all_passed() {
                return Err(CliError::Verification(format!(
                    "{} check(s) failed",
                    report.failures()
                )));
            }
            Ok(())
        }
    }
}

fn render(table: &table::Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
