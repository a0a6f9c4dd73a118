//! Batch front-end behind the `nanotube-bands` binary.
//!
//! Every output carries the schema tag [`SCHEMA`] and an echo of the
//! resolved configuration. Output goes to `--output` when given, resolved
//! against `$NANOTUBE_BANDS_OUT_DIR` for relative paths; with no `--output`
//! and the variable set, to `<dir>/<command>.<ext>`; otherwise to stdout.

mod commands;
pub mod config;
pub mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::PARTIAL_FRACTION_POINTS;
pub use config::{Grid, MagneticInput, PotentialInput, RunConfig};
pub use render::Format;

use crate::error::Error;

pub const SCHEMA: &str = "nanotube-bands/1";
pub const OUT_DIR_ENV: &str = "NANOTUBE_BANDS_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nanotube-bands",
    version,
    about = "Band structures of zigzag nanotube graphs in a magnetic field"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band edges, gaps, comb heights and flat bands
    Bands(RunArgs),
    /// Effective masses at every edge and the trace identity
    Masses(RunArgs),
    /// Quasimomentum k(λ) on a grid
    Dispersion(RunArgs),
    /// Inequality sweep and identity residuals
    Verify(RunArgs),
    /// Floquet multipliers from the vertex conditions against ξ
    Oracle(RunArgs),
    /// Eigenvalues of infinite multiplicity
    Flatbands(RunArgs),
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// TOML file with any of the keys below; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named potential: zero, two-step, two-step-shifted, square-wave, three-piece
    #[arg(long)]
    pub q: Option<String>,
    /// Piecewise-constant potential as width:value,width:value,...
    #[arg(long, allow_hyphen_values = true)]
    pub pieces: Option<String>,
    /// Equal-width samples v,v,...
    #[arg(long, allow_hyphen_values = true)]
    pub samples: Option<String>,
    /// Reduced phase a in radians (sector 0)
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Field strength; needs --N
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Circumference index
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Sector index in 0..N
    #[arg(long)]
    pub j: Option<usize>,
    /// Highest gap index
    #[arg(long)]
    pub n_max: Option<usize>,
    /// λ grid as lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Rendered output and where it was written, if anywhere.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub written: Option<PathBuf>,
}

fn destination(cfg: &RunConfig, command: &str, out_dir: Option<&Path>) -> Option<PathBuf> {
    match (&cfg.output, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{command}.{}", cfg.format.extension()))),
        (None, None) => None,
    }
}

/// Result of argument parsing.
#[derive(Debug)]
pub enum Parsed {
    Run(Box<Command>),
    /// `--help` or `--version` text.
    Info(String),
}

/// Parses `args`, including the program name.
pub fn parse<I, T>(args: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::error::ErrorKind;
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(Parsed::Run(Box::new(cli.command))),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            Ok(Parsed::Info(e.to_string()))
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

/// Parses `args` and runs the command, honouring `$NANOTUBE_BANDS_OUT_DIR`.
pub fn run<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse(args)? {
        Parsed::Info(text) => Ok(Outcome {
            text,
            written: None,
        }),
        Parsed::Run(command) => {
            let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
            execute(&command, out_dir.as_deref())
        }
    }
}

/// Runs an already parsed command.
pub fn execute(command: &Command, out_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let (name, args) = match command {
        Command::Bands(a) => ("bands", a),
        Command::Masses(a) => ("masses", a),
        Command::Dispersion(a) => ("dispersion", a),
        Command::Verify(a) => ("verify", a),
        Command::Oracle(a) => ("oracle", a),
        Command::Flatbands(a) => ("flatbands", a),
    };
    let config = RunConfig::resolve(args)?;
    let inputs = commands::Inputs {
        potential: config.potential.build()?,
        magnetic: config.magnetic.build()?,
        config,
    };
    let text = match command {
        Command::Bands(_) => commands::bands(&inputs),
        Command::Masses(_) => commands::masses(&inputs),
        Command::Dispersion(_) => commands::dispersion(&inputs),
        Command::Verify(_) => commands::verify(&inputs),
        Command::Oracle(_) => commands::oracle(&inputs),
        Command::Flatbands(_) => commands::flatbands(&inputs),
    }?;
    let written = destination(&inputs.config, name, out_dir);
    if let Some(path) = &written {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
        std::fs::write(path, &text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Outcome { text, written })
}
