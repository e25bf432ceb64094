use std::path::PathBuf;

use backdoor_core::detectors::DetectorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "backdoor",
    version,
    about = "Feasibility bounds, detector risks and attacks for backdoor detection"
)]
pub struct Cli {
    /// Append a JSON-lines record of the result to this file (skipped when
    /// a record with the same config hash is already present)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum training-set sizes implied by the impossibility bound
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Monte-Carlo risk of a detector on a distribution pair
    Risk(RiskArgs),
    /// Gaussian projection attack against a KS goodness-of-fit defense
    Toy(ToyArgs),
    /// Risk of a clean-distribution detector against the random-subset attack
    Probe(ProbeArgs),
    /// Run an experiment described by a JSON config file
    Run(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// One row per dataset of the catalog
    Table2(Table2Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.001)]
    pub beta: f64,
    /// JSON list of datasets; defaults to the bundled catalog
    #[arg(long, value_name = "PATH")]
    pub catalog: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[arg(long, default_value = "np", value_parser = parse_detector)]
    pub detector: DetectorKind,
    /// Alphabet size of the generated benchmark pair (ignored with --pair)
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Training set size
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Poisoning rate; overrides the pair file [default: 0.5]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Closeness slack; overrides the pair file [default: 1 - TV(p0, pb)]
    #[arg(long)]
    pub beta: Option<f64>,
    /// JSON pair {"p0": [...], "pb": [...], "gamma": g, "beta": b}
    #[arg(long, value_name = "PATH")]
    pub pair: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compute the exact Neyman-Pearson risk by enumeration
    #[arg(long)]
    pub oracle: bool,
    /// Enumeration budget for --oracle, in outcomes
    #[arg(long, default_value_t = backdoor_core::dist::DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 150)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Detector direction, normalized to unit length if needed
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0.981,0.196"
    )]
    pub v: Vec<f64>,
    /// Number of consecutive seeds to run
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// First seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write scatter and projection histogram of the first seed as SVG
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Write the first seed's training samples as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeDetector {
    /// Type-threshold detector with the probe's gamma and beta
    #[value(name = "type2-tv")]
    TypeTv,
    /// Flags datasets containing a repeated symbol
    Collision,
}

impl ProbeDetector {
    pub fn name(self) -> &'static str {
        match self {
            ProbeDetector::TypeTv => "type2-tv",
            ProbeDetector::Collision => "collision",
        }
    }
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = 100_000)]
    pub k: usize,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ProbeDetector::TypeTv)]
    pub detector: ProbeDetector,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
}

fn parse_detector(s: &str) -> Result<DetectorKind, String> {
    s.parse().map_err(|e: backdoor_core::Error| e.to_string())
}
