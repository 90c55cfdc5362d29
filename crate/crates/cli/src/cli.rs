use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "blepin",
    version,
    about = "BLE PIN-authentication link simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// RSSI and delivery sweep over distance; writes sweep and analytical CSVs.
    Sweep(SweepArgs),
    /// Least-squares path-loss fit of a `distance_m,rssi_dbm` CSV.
    Fit(FitArgs),
    /// Scripted authentication session over the simulated link.
    Session(SessionArgs),
    /// Type on the virtual keypad and watch the central's display.
    Interactive(InteractiveArgs),
    /// The four canonical environment sweeps, one CSV pair each.
    ReproduceFigures(FiguresArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// indoor, outdoor, combined or ground.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ChannelArgs {
    /// Override the shadowing standard deviation (dB).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Override RSSI at the 1 m reference distance (dBm).
    #[arg(long)]
    pub rssi0: Option<f64>,
    /// Split the route at this distance (m) into a second segment.
    #[arg(long)]
    pub boundary: Option<f64>,
    /// dB step applied beyond --boundary (default 6).
    #[arg(long, allow_hyphen_values = true)]
    pub boundary_offset: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Lin,
}

impl std::str::FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<u32>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Explicit comma-separated distances; overrides --from/--to/--points.
    #[arg(long)]
    pub distances: Option<String>,
    #[arg(long)]
    pub trials: Option<u32>,
    /// Analytical overlay path (default: `<out stem>_analytical.csv`).
    #[arg(long)]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with `distance_m` and `rssi_dbm` columns (sweep output works).
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub d0: f64,
    /// Also print the deviation of the fitted exponent from this value.
    #[arg(long)]
    pub expect_alpha: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NodeArgs {
    /// Stored PIN at the central (4 symbols from 0-9, A-F).
    #[arg(long)]
    pub pin: Option<String>,
    #[arg(long)]
    pub max_count: Option<u8>,
    #[arg(long)]
    pub lockout_ms: Option<u32>,
    #[arg(long)]
    pub distance: Option<f64>,
    #[arg(long)]
    pub telemetry_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub node: NodeArgs,
    /// Script file: one `time_ms key` pair per line, `;` starts a comment.
    #[arg(long, conflicts_with = "pin_attempts")]
    pub script: Option<PathBuf>,
    /// Comma-separated PIN attempts, each typed then submitted with `#`.
    #[arg(long)]
    pub pin_attempts: Option<String>,
    #[arg(long)]
    pub horizon: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InteractiveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub node: NodeArgs,
    /// Simulated milliseconds that elapse per typed key.
    #[arg(long, default_value_t = 250)]
    pub step_ms: u64,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}
