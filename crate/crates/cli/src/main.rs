//! `relcoulomb`: spectra, Green's function tables, wavefunctions and
//! verification suites for the Klein-Gordon Coulomb problem in D dimensions.
//!
//! Exit status: 0 success, 1 domain or configuration error, 2 numerical
//! failure (including a failed verification suite), 3 I/O error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relcoulomb::ErrorClass;

#[derive(Debug, Parser, Serialize)]
#[command(name = "relcoulomb", version, about = "Relativistic Coulomb Green's function toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when absent. Not echoed into the
    /// output, so the same run written to two places gives identical bytes.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Units of energy, length and wavenumber columns. Inputs are always
    /// natural units (rest energy, Compton wavelength).
    #[arg(long, global = true, value_enum, default_value_t = Units::Natural)]
    pub units: Units,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Natural,
    /// Electron rest energy in joules and reduced Compton wavelength in metres.
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Closed,
    Integral,
    Series,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Quadrature,
    All,
}

#[derive(Debug, Args, Serialize)]
pub struct System {
    /// Coupling constant alpha.
    #[arg(long)]
    pub alpha: f64,
    /// Spatial dimension D.
    #[arg(long = "dim")]
    pub dim: u32,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact and perturbative bound-state energies.
    Spectrum {
        #[command(flatten)]
        system: System,
        /// Largest principal quantum number.
        #[arg(long)]
        n_max: u32,
        /// Largest orbital quantum number; defaults to n_max - 1.
        #[arg(long)]
        l_max: Option<u32>,
    },
    /// Radial Green's function G_l(r_b, r_a; E) over a grid.
    Green {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        l: u32,
        /// Energies in units of the rest energy, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        energy: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        rb: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        ra: Vec<f64>,
        #[arg(long, value_enum, default_value_t = RouteArg::Closed)]
        route: RouteArg,
        /// Terms of the coupling series.
        #[arg(long, default_value_t = 25)]
        n_terms: usize,
    },
    /// Normalized bound-state radial function on a uniform grid.
    BoundWf {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
        /// Largest radius; defaults to 20 modified Bohr radii times N.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Continuum radial function on a uniform grid.
    ContinuumWf {
        #[command(flatten)]
        system: System,
        /// Wavenumber in inverse Compton wavelengths.
        #[arg(long)]
        k: f64,
        #[arg(long)]
        l: u32,
        /// Largest radius; defaults to the argument limit 2 k r <= 60.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Pole residues of G_l at a bound state on a radial grid.
    Residues {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
        /// Radii; defaults to {0.5, 1, 2, 4} / (alpha kappa).
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Discontinuity of G_l across the scattering cut, by both routes.
    Disc {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        l: u32,
        /// Energies above the rest energy, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        energy: Vec<f64>,
        #[arg(long)]
        rb: f64,
        #[arg(long)]
        ra: f64,
    },
    /// Randomized verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Identities)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Partial sums of the coupling series for G_l.
    Series {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        rb: f64,
        #[arg(long)]
        ra: f64,
        #[arg(long, default_value_t = 25)]
        n_terms: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Green { .. } => "green",
            Command::BoundWf { .. } => "bound-wf",
            Command::ContinuumWf { .. } => "continuum-wf",
            Command::Residues { .. } => "residues",
            Command::Disc { .. } => "disc",
            Command::Verify { .. } => "verify",
            Command::Series { .. } => "series",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(relcoulomb::Error),
    /// A verification suite ran but did not pass; the report is still written.
    Failed(String),
    Io(String),
}

impl From<relcoulomb::Error> for CliError {
    fn from(e: relcoulomb::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) => match e.class() {
                ErrorClass::Domain => 1,
                ErrorClass::Numerical => 2,
            },
            CliError::Failed(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relcoulomb {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
