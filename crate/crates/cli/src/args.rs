//! Flag definitions. Every value is optional here: unset flags fall back to
//! the `--config` file and then to built-in defaults (see [`crate::settings`]).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "homolog",
    version,
    about = "Profiles, spectra and perturbation runs for homologous Goldreich-Weber stars"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the enthalpy profile w_δ on [0, 1] (CSV z,w,wprime).
    Profile(ProfileArgs),
    /// Sample the mass M(δ) and its finite-difference derivative.
    MassCurve(MassCurveArgs),
    /// Integrate the homogeneous radius equation λ²λ̈ = δ.
    Lambda(LambdaArgs),
    /// Classify a (δ, λ₁) grid and draw the bifurcation diagram.
    Bifurcation(BifurcationArgs),
    /// Lowest eigenvalues of the weighted operators L_{δ,k}.
    Spectrum(SpectrumArgs),
    /// Liouville potential q(y) of L_{δ,k}.
    Liouville(LiouvilleArgs),
    /// Evolve a perturbation in the self-similar or linear-rate frame.
    Simulate(SimulateArgs),
    /// Run independent simulations over δ and energy on a worker pool.
    Sweep(SweepArgs),
    /// Fit an exponential decay to a column of a diagnostics CSV.
    DecayFit(DecayFitArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Grid resolution (profile intervals or finite-volume cells).
    #[arg(long)]
    pub n: Option<usize>,
    /// Tolerance of the profile solver.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Primary output file (a directory for `sweep`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with `[section] key = value` entries; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MassCurveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BifurcationArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1_max: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Samples along δ.
    #[arg(long)]
    pub n_delta: Option<usize>,
    /// Samples along λ₁.
    #[arg(long)]
    pub n_lambda1: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    /// Weight indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    #[arg(long)]
    pub n_eigs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LiouvilleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameArg {
    SelfSimilar,
    LinearRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    Eigenmode,
    ConstantPlusMode,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotArg {
    Position,
    Velocity,
}

/// Everything that defines a single perturbation run.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Target high-order energy of the initial data.
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long, value_enum)]
    pub shape: Option<ShapeArg>,
    /// Slot that carries the shape.
    #[arg(long, value_enum)]
    pub slot: Option<SlotArg>,
    #[arg(long)]
    pub mode_index: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub constant: Option<f64>,
    #[arg(long)]
    pub bump_center: Option<f64>,
    #[arg(long)]
    pub bump_width: Option<f64>,
    /// Background radius and velocity (linear-rate frame).
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub dt_max: Option<f64>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub norm_order: Option<usize>,
    #[arg(long)]
    pub snapshot_interval: Option<f64>,
    /// Drop the nonlinearity.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub linearized: Option<bool>,
    /// Start of the decay-fit window (defaults to a third of `t_end`).
    #[arg(long)]
    pub fit_start: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub run: RunArgs,
    /// Values of δ, comma separated (overrides --delta).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub deltas: Option<Vec<f64>>,
    /// Initial energies, comma separated (overrides --energy).
    #[arg(long, value_delimiter = ',')]
    pub energies: Option<Vec<f64>>,
    /// Size of the worker pool.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DecayFitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Diagnostics CSV to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub time_column: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub window_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub window_end: Option<f64>,
}
