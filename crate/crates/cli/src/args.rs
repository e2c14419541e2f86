use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Tangential and local dimensions of translation fractals.
#[derive(Debug, Parser)]
#[command(name = "tandim", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form dimensions from the schedule counts.
    Oracle(RunArgs),
    /// Dimensions estimated from certified ball measures.
    Estimate(RunArgs),
    /// Certified enclosure of a single ball measure.
    Ball(BallArgs),
    /// Property suite; exit status 1 if any property fails.
    Check(RunArgs),
    /// Moran equation for a list of similarity ratios.
    Moran(MoranArgs),
    /// Write scale function, slope surface, estimates (and a plot) to --out.
    Export(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Schedule description file.
    #[arg(long, conflicts_with = "generator")]
    pub schedule: Option<PathBuf>,
    /// Named schedule: cantor, carpet, vicsek, carpet-vicsek.
    #[arg(long)]
    pub generator: Option<String>,
    /// Measure expression, e.g. `product(cantor,cantor)` or
    /// `lipschitz(schedule,2)`; `schedule` names the loaded schedule.
    #[arg(long)]
    pub measure: Option<String>,
    /// Point spec `prefix=c|c;tail=first-kept`; join specs with `&` for
    /// product measures.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub guard: Option<usize>,
    #[arg(long = "h-min")]
    pub h_min: Option<f64>,
    #[arg(long = "h-columns")]
    pub h_columns: Option<usize>,
    #[arg(long = "k-min")]
    pub k_min: Option<usize>,
    #[arg(long = "tail-fraction")]
    pub tail_fraction: Option<f64>,
    /// Agreement tolerance used by `check`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Emit exact rationals alongside the scale function.
    #[arg(long)]
    pub exact: bool,
    /// Also write an SVG plot.
    #[arg(long)]
    pub svg: bool,
    /// Output directory (overrides TANDIM_OUT and the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Radius as `p` or `p/q`.
    #[arg(long)]
    pub radius: String,
    /// Cylinder level for the enumeration; defaults to `guard` levels below
    /// the radius.
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct MoranArgs {
    /// Comma-separated ratios, e.g. `1/2,1/4`.
    #[arg(long)]
    pub ratios: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}
