use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Split kinetic energies of hydrogenic and free or boxed states into their
/// classical and Weizsäcker parts, writing CSV fields and JSON summaries.
#[derive(Debug, Parser)]
#[command(name = "kinsplit", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radial distributions and totals for a hydrogenic orbital.
    Hydrogen(HydrogenArgs),
    /// Two-level particle-in-a-box superposition at the requested times.
    Pib(PibArgs),
    /// Freely spreading Gaussian packet at the requested times.
    Gaussian(GaussianArgs),
    /// Deformed kinetic energy along `u = alpha * u_c`.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output path prefix; extensions and time suffixes are appended.
    #[arg(long, default_value = "kinsplit")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Outer radius of the radial grid in Bohr (hydrogen only).
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Number of radial (hydrogen) or spatial (1D) grid points; must be odd.
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of polar-angle points (hydrogen only); must be odd.
    #[arg(long)]
    pub theta_points: Option<usize>,
    /// Left end of the 1D grid. For the box this must be 0.
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    /// Right end of the 1D grid. For the box this is the box length.
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OrbitalArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct HydrogenArgs {
    #[command(flatten)]
    pub orbital: OrbitalArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PibArgs {
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,0.075,0.15")]
    pub times: Vec<f64>,
    /// Real amplitudes of the box modes k = 1, 2, ... (normalized on input).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,1")]
    pub coeffs: Vec<f64>,
    /// Also propagate with Crank-Nicolson and report the L2 distance.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GaussianArgs {
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,1.5,3")]
    pub times: Vec<f64>,
    /// Also propagate with Crank-Nicolson and report the L2 distance.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    Hydrogen,
    Pib,
    Gaussian,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub system: SystemKind,
    #[command(flatten)]
    pub orbital: OrbitalArgs,
    /// Time of the box or Gaussian state [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub time: Option<f64>,
    /// Real amplitudes of the box modes (box only) [default: 1,1].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Comma-separated scale factors alpha.
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
